#pragma once

// Minimal self-contained SVG emitters for the two analysis figures: the
// eigenvalue-vs-PR scatter and the PR histogram with its fitted curve.
// Static files only, no scripting, no external references.

#include <string>

#include "qloc/localization.hpp"

namespace qloc {

// Scatter of (eigenvalue, PR), one marker per mode; kept modes are drawn
// in color, discarded ones in gray, with a dashed line at the threshold.
std::string spectrum_scatter_svg(const ModeSpectrum& spectrum,
                                 const ModeSelection& selection);

// PR histogram bars with the Lorentzian overlaid and a dashed vertical
// line at the selection threshold.
std::string pr_histogram_svg(const PrHistogram& hist, const LorentzianFit& fit,
                             double pr_threshold);

void write_text_file(const std::string& path, const std::string& content);

} // namespace qloc
