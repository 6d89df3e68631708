#pragma once

namespace detline {

// Process-wide numeric thresholds. Set once (CLI startup, test setup) before
// any computation; read-only afterwards.
struct Tolerance {
  double rank = 1e-10;        // pivot threshold, relative to the largest entry
  double ill_low = 1e-12;     // pivots in [ill_low, ill_high] * scale are undecidable
  double ill_high = 1e-8;
  double flat = 1e-9;         // flatness and boundary-square residuals, relative
  double unimodular = 1e-10;  // | |det R| - 1 |
};

const Tolerance& tolerance();
void set_tolerance(const Tolerance& t);

}  // namespace detline
