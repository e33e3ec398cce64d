#pragma once

#include <utility>

#include "casimir/materials.hpp"

namespace casimir {

/// Film (medium 2) of thickness `thickness_nm` between plate1 and plate3.
struct LayerStack {
  MaterialResponse plate1 = MaterialResponse::vacuum();
  MaterialResponse film = MaterialResponse::vacuum();
  MaterialResponse plate3 = MaterialResponse::vacuum();
  double thickness_nm = 100.0;
  double temperature_k = 300.0;

  /// Throws DomainError for a < 1 nm or T <= 0.
  void validate() const;

  LayerStack with_thickness(double a) const {
    LayerStack s = *this;
    s.thickness_nm = a;
    return s;
  }
  LayerStack swapped_plates() const {
    LayerStack s = *this;
    std::swap(s.plate1, s.plate3);
    return s;
  }
};

}  // namespace casimir
