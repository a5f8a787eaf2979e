#pragma once

namespace pauli::detail {

// Neumaier's variant: also safe when a term exceeds the running sum.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if ((sum >= 0 ? sum : -sum) >= (x >= 0 ? x : -x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace pauli::detail
