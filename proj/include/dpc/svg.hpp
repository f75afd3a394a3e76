#ifndef DPC_SVG_HPP
#define DPC_SVG_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "dpc/contract.hpp"
#include "dpc/harness.hpp"
#include "dpc/report_io.hpp"

namespace dpc {

/// Deterministic SVG heatmap of the four stage-wise cue maps: stages along
/// the x axis, one row per cue, value encoded as fill opacity. A constant row
/// renders at opacity 0.5. Identical records give identical bytes.
inline std::string render_heatmap(const TrajectoryRecord& rec) {
    DPC_REQUIRE(rec.num_stages >= 1, "render_heatmap: empty record");
    const std::vector<std::pair<std::string, const Vec*>> rows = {
        {"A_hat", &rec.mean_agreement},
        {"P_hat", &rec.mean_anchoring},
        {"C_hat", &rec.mean_coverage},
        {"D_hat", &rec.mean_deficiency},
    };
    const int cell = 48;
    const int left = 96;
    const int top = 42;
    const int legend_w = 190;
    const int width = left + cell * static_cast<int>(rec.num_stages) + legend_w;
    const int height = top + cell * static_cast<int>(rows.size()) + 20;

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
         " " + std::to_string(height) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" fill=\"white\"/>\n";
    s += "<text x=\"" + std::to_string(left) + "\" y=\"24\" font-family=\"monospace\" "
         "font-size=\"14\">readiness cues (" + rec.condition + ")</text>\n";

    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Vec& values = *rows[r].second;
        DPC_REQUIRE(values.size() == rec.num_stages, "render_heatmap: map size mismatch");
        double lo = values[0], hi = values[0];
        for (double v : values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const bool flat = (hi - lo) < 1e-15;
        const int y = top + static_cast<int>(r) * cell;
        s += "<text x=\"8\" y=\"" + std::to_string(y + cell / 2 + 5) +
             "\" font-family=\"monospace\" font-size=\"13\">" + rows[r].first + "</text>\n";
        for (std::size_t l = 0; l < rec.num_stages; ++l) {
            const double opacity = flat ? 0.5 : (values[l] - lo) / (hi - lo);
            const int x = left + static_cast<int>(l) * cell;
            s += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
                 std::to_string(cell) + "\" height=\"" + std::to_string(cell) +
                 "\" fill=\"#20467a\" fill-opacity=\"" + format_fixed(opacity, 6) +
                 "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
        }
        const int lx = left + cell * static_cast<int>(rec.num_stages) + 10;
        s += "<text x=\"" + std::to_string(lx) + "\" y=\"" + std::to_string(y + cell / 2 + 5) +
             "\" font-family=\"monospace\" font-size=\"11\">[" + format_fixed(lo, 4) + ", " +
             format_fixed(hi, 4) + "]</text>\n";
    }

    const int axis_y = top + cell * static_cast<int>(rows.size()) + 14;
    for (std::size_t l = 0; l < rec.num_stages; ++l) {
        const int x = left + static_cast<int>(l) * cell + cell / 2 - 4;
        s += "<text x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(axis_y) +
             "\" font-family=\"monospace\" font-size=\"12\">" + std::to_string(l + 1) +
             "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace dpc

#endif
