#include "cascnn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cascnn {

namespace {

constexpr double kXMin = 0.125, kXMax = 8.0;
constexpr int kPlotLeft = 70, kPlotTop = 30, kPlotWidth = 560, kPlotHeight = 400;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

double x_of(double fp_per_scan) {
    const double clamped = std::clamp(fp_per_scan, kXMin, kXMax);
    const double t = (std::log2(clamped) - std::log2(kXMin)) /
                     (std::log2(kXMax) - std::log2(kXMin));
    return kPlotLeft + t * kPlotWidth;
}

double y_of(double sensitivity) {
    return kPlotTop + (1.0 - std::clamp(sensitivity, 0.0, 1.0)) * kPlotHeight;
}

}  // namespace

std::string froc_svg(const RunComparison& comparison) {
    std::ostringstream s;
    const int width = kPlotLeft + kPlotWidth + 180;
    const int height = kPlotTop + kPlotHeight + 60;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // grid and axis labels
    s << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (double fp = kXMin; fp <= kXMax * 1.0001; fp *= 2.0) {
        const double x = x_of(fp);
        s << "<line x1=\"" << x << "\" y1=\"" << kPlotTop << "\" x2=\"" << x << "\" y2=\""
          << (kPlotTop + kPlotHeight) << "\" stroke=\"#ddd\"/>\n";
        s << "<text x=\"" << x << "\" y=\"" << (kPlotTop + kPlotHeight + 18)
          << "\" text-anchor=\"middle\">" << fp << "</text>\n";
    }
    for (int i = 0; i <= 10; ++i) {
        const double sens = i / 10.0;
        const double y = y_of(sens);
        s << "<line x1=\"" << kPlotLeft << "\" y1=\"" << y << "\" x2=\""
          << (kPlotLeft + kPlotWidth) << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
        s << "<text x=\"" << (kPlotLeft - 8) << "\" y=\"" << (y + 4)
          << "\" text-anchor=\"end\">" << sens << "</text>\n";
    }
    s << "<text x=\"" << (kPlotLeft + kPlotWidth / 2) << "\" y=\""
      << (kPlotTop + kPlotHeight + 40)
      << "\" text-anchor=\"middle\">false positives per scan</text>\n";
    s << "<text x=\"16\" y=\"" << (kPlotTop + kPlotHeight / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (kPlotTop + kPlotHeight / 2) << ")\">sensitivity</text>\n";
    s << "</g>\n";

    s << "<rect x=\"" << kPlotLeft << "\" y=\"" << kPlotTop << "\" width=\"" << kPlotWidth
      << "\" height=\"" << kPlotHeight << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (std::size_t i = 0; i < comparison.curves.size(); ++i) {
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& pt : comparison.curves[i].points)
            s << x_of(pt.fp_per_scan) << ',' << y_of(pt.sensitivity) << ' ';
        s << "\"/>\n";

        // legend entry
        const double ly = kPlotTop + 14 + 18.0 * static_cast<double>(i);
        s << "<line x1=\"" << (kPlotLeft + kPlotWidth + 12) << "\" y1=\"" << ly << "\" x2=\""
          << (kPlotLeft + kPlotWidth + 36) << "\" y2=\"" << ly << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
        s << "<text font-family=\"sans-serif\" font-size=\"12\" x=\""
          << (kPlotLeft + kPlotWidth + 42) << "\" y=\"" << (ly + 4) << "\">"
          << comparison.labels[i] << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace cascnn
