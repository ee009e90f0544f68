#include "tomo/svg.hpp"

#include <cmath>
#include <sstream>

#include "tomo/error.hpp"
#include "tomo/runner.hpp"

namespace tomo {

std::string render_phase_svg(const SuccessGrid& grid, const ThresholdCurve& curve) {
  const auto& ds = grid.d_values();
  const auto& thrs = grid.thresholds(curve.metric);
  if (thrs.empty()) {
    throw Error(Error::Kind::invalid_argument, "render_phase_svg: no thresholds");
  }

  const double cell_w = 24.0;
  const double cell_h = 18.0;
  const double margin_left = 70.0;
  const double margin_bottom = 40.0;
  const double margin_top = 24.0;
  const double margin_right = 16.0;
  const double plot_w = cell_w * static_cast<double>(ds.size());
  const double plot_h = cell_h * static_cast<double>(thrs.size());
  const double width = margin_left + plot_w + margin_right;
  const double height = margin_top + plot_h + margin_bottom;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  svg << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  // Threshold rows are drawn bottom-up, matching the paper's maps where the
  // easiest sublevel sets sit at the bottom.
  for (std::size_t ti = 0; ti < thrs.size(); ++ti) {
    const double y = margin_top + plot_h - cell_h * static_cast<double>(ti + 1);
    for (std::size_t di = 0; di < ds.size(); ++di) {
      const double p = grid.p_success(curve.t, ds[di], curve.metric, thrs[ti]);
      const int v = static_cast<int>(std::lround(255.0 * (1.0 - p)));
      const double x = margin_left + cell_w * static_cast<double>(di);
      svg << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w
          << "\" height=\"" << cell_h << "\" fill=\"rgb(" << v << "," << v << ","
          << v << ")\"/>\n";
    }
  }

  // Threshold curve through cell centers; unreached rows break the polyline.
  std::ostringstream points;
  bool any = false;
  for (std::size_t ti = 0; ti < curve.points.size(); ++ti) {
    const auto& pt = curve.points[ti];
    if (!pt.d_star) continue;
    std::size_t di = 0;
    while (di < ds.size() && ds[di] != *pt.d_star) ++di;
    if (di == ds.size()) continue;
    const double x = margin_left + cell_w * (static_cast<double>(di) + 0.5);
    const double y = margin_top + plot_h - cell_h * (static_cast<double>(ti) + 0.5);
    points << (any ? " " : "") << x << "," << y;
    any = true;
  }
  if (any) {
    svg << "  <polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\""
        << points.str() << "\"/>\n";
  }

  for (std::size_t di = 0; di < ds.size(); ++di) {
    const double x = margin_left + cell_w * (static_cast<double>(di) + 0.5);
    svg << "  <text x=\"" << x << "\" y=\"" << margin_top + plot_h + 16.0
        << "\" font-size=\"9\" text-anchor=\"middle\">" << ds[di] << "</text>\n";
  }
  for (std::size_t ti = 0; ti < thrs.size(); ++ti) {
    const double y = margin_top + plot_h - cell_h * (static_cast<double>(ti) + 0.5);
    svg << "  <text x=\"" << margin_left - 6.0 << "\" y=\"" << y + 3.0
        << "\" font-size=\"9\" text-anchor=\"end\">" << format_double(thrs[ti])
        << "</text>\n";
  }
  svg << "  <text x=\"" << margin_left + plot_w / 2.0 << "\" y=\""
      << margin_top + plot_h + 32.0
      << "\" font-size=\"11\" text-anchor=\"middle\">training dimension d</text>\n";
  svg << "  <text x=\"" << margin_left + plot_w / 2.0 << "\" y=\"14\""
      << " font-size=\"11\" text-anchor=\"middle\">P_s by " << metric_name(curve.metric)
      << " threshold (t=" << curve.t << ", delta=" << format_double(curve.delta)
      << ")</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace tomo
