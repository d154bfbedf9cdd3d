/// Output plumbing: CSV rendering with a fixed numeric format, atomic file
/// writes (temp + rename, so a failed run never leaves a partial file), and
/// a small static SVG scatter renderer for spectra and sweep curves.
#pragma once

#include "slocal/common.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace slocal {

/// Canonical numeric formatting for all CSV output: 12 significant digits,
/// shortest form ("%.12g"), so identical doubles always print identically.
std::string format_sig(double v);

/// Renders header + rows as CSV text with LF line endings. Every row must
/// have the same number of fields as the header.
std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows);

/// Writes content to path via a sibling temporary file and an atomic rename.
/// On any failure the temporary is removed and nothing appears at path.
void write_text_atomic(const std::string& path, const std::string& content);

/// One scatter series: points plus a flag for connecting them in x order.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool connect = false;
};

/// Static scatter plot (presentation only — no acceptance semantics).
std::string render_scatter_svg(const std::string& title,
                               const std::string& x_label,
                               const std::string& y_label,
                               const std::vector<SvgSeries>& series);

}  // namespace slocal
