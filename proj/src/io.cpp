#include "slocal/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <limits>
#include <system_error>

namespace slocal {

std::string format_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  };
  emit(header);
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw config_error("render_csv: row width does not match header");
    emit(row);
  }
  return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  if (path.empty()) throw config_error("write_text_atomic: empty path");
  const std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f)
    throw config_error("cannot open '" + tmp + "' for writing: " +
                       std::strerror(errno));
  const std::size_t written = std::fwrite(content.data(), 1, content.size(), f);
  const bool flushed = std::fflush(f) == 0;
  const bool closed = std::fclose(f) == 0;
  if (written != content.size() || !flushed || !closed) {
    std::remove(tmp.c_str());
    throw numerical_failure("short write to '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    const int err = errno;
    std::remove(tmp.c_str());
    throw config_error("cannot rename '" + tmp + "' to '" + path +
                       "': " + std::strerror(err));
  }
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_scatter_svg(const std::string& title,
                               const std::string& x_label,
                               const std::string& y_label,
                               const std::vector<SvgSeries>& series) {
  const double width = 800, height = 520;
  const double ml = 70, mr = 30, mt = 50, mb = 60;  // margins
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmin <= xmax)) { xmin = 0; xmax = 1; }
  if (!(ymin <= ymax)) { ymin = 0; ymax = 1; }
  if (xmax == xmin) { xmin -= 0.5; xmax += 0.5; }
  if (ymax == ymin) { ymin -= 0.5; ymax += 0.5; }
  const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  static const char* kColors[] = {"#1f6fb2", "#c0392b", "#2e8b57", "#8e44ad",
                                  "#d4820a", "#16808a"};
  char buf[256];
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
         "height=\"520\" viewBox=\"0 0 800 520\">\n";
  svg += "<rect width=\"800\" height=\"520\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.0f\" y=\"28\" font-size=\"18\" text-anchor=\"middle\" "
                "font-family=\"sans-serif\">%s</text>\n",
                ml + pw / 2, escape_xml(title).c_str());
  svg += buf;

  // frame and tick labels (min / max on each axis)
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                "fill=\"none\" stroke=\"#444\"/>\n",
                ml, mt, pw, ph);
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                "font-family=\"sans-serif\">%s</text>\n",
                ml, height - mb + 18, format_sig(xmin).c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                "text-anchor=\"end\" font-family=\"sans-serif\">%s</text>\n",
                ml + pw, height - mb + 18, format_sig(xmax).c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                "text-anchor=\"end\" font-family=\"sans-serif\">%s</text>\n",
                ml - 6, mt + ph, format_sig(ymin).c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                "text-anchor=\"end\" font-family=\"sans-serif\">%s</text>\n",
                ml - 6, mt + 12, format_sig(ymax).c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"14\" "
                "text-anchor=\"middle\" font-family=\"sans-serif\">%s</text>\n",
                ml + pw / 2, height - 14, escape_xml(x_label).c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"18\" y=\"%.1f\" font-size=\"14\" "
                "text-anchor=\"middle\" font-family=\"sans-serif\" "
                "transform=\"rotate(-90 18 %.1f)\">%s</text>\n",
                mt + ph / 2, mt + ph / 2, escape_xml(y_label).c_str());
  svg += buf;

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % (sizeof kColors / sizeof *kColors)];
    if (s.connect && s.x.size() > 1) {
      svg += "<polyline fill=\"none\" stroke=\"";
      svg += color;
      svg += "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
        svg += buf;
      }
      svg += "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      std::snprintf(buf, sizeof buf,
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\"/>\n",
                    px(s.x[i]), py(s.y[i]), color);
      svg += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" fill=\"%s\" "
                  "font-family=\"sans-serif\">%s</text>\n",
                  ml + pw - 150, mt + 18 + 16 * double(si), color,
                  escape_xml(s.label).c_str());
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace slocal
