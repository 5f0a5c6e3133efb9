#pragma once

// SVG rendering of two-party tables: cells filled by output value, ideal
// region borders drawn thick, optional protocol leaves overlaid as dashed
// rectangles. Party 1's input runs down the rows, party 2's across the columns.

#include "approxpriv/protocol.hpp"

#include <optional>
#include <sstream>

namespace approxpriv {

struct SvgOptions {
    int cell_px = 0;  // 0 picks a size from the grid side
    bool labels = true;
};

namespace detail {

inline const char* svg_palette(std::uint32_t value)
{
    static constexpr const char* colors[] = {"#f2f0e6", "#8fb8de", "#f4a259", "#9bc995", "#e07a5f", "#c3aed6",
                                             "#f2cc8f", "#81b29a", "#d4a5a5", "#6d9dc5", "#e9c46a", "#b5838d"};
    return colors[value % (sizeof(colors) / sizeof(colors[0]))];
}

}  // namespace detail

inline std::string render_svg(const FunctionTable& table, const RegionMap& regions, const ProtocolTree* overlay = nullptr,
                              SvgOptions opt = {})
{
    if (table.dims() != 2) throw ValidationError("rendering supports two-party tables only");
    if (!(regions.shape() == table.shape())) throw ValidationError("region map does not match table");
    const int n = table.side();
    const int px = opt.cell_px > 0 ? opt.cell_px : std::max(6, 512 / n);
    const int margin = 8;
    const int size = n * px + 2 * margin;
    const bool labels = opt.labels && px >= 16;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
       << size << ' ' << size << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size << "\" fill=\"#ffffff\"/>\n";
    os << "<g stroke=\"#cccccc\" stroke-width=\"0.5\">\n";
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            const int c[2] = {x, y};
            os << "<rect x=\"" << margin + y * px << "\" y=\"" << margin + x * px << "\" width=\"" << px << "\" height=\""
               << px << "\" fill=\"" << detail::svg_palette(table.at(c)) << "\"/>\n";
        }
    os << "</g>\n";
    if (labels) {
        os << "<g font-family=\"monospace\" font-size=\"" << px / 2 << "\" text-anchor=\"middle\" fill=\"#333333\">\n";
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                const int c[2] = {x, y};
                os << "<text x=\"" << margin + y * px + px / 2 << "\" y=\"" << margin + x * px + (2 * px) / 3 << "\">"
                   << table.symbol(table.at(c)) << "</text>\n";
            }
        os << "</g>\n";
    }

    // Region borders: segments between edge-adjacent cells of different regions, plus the frame.
    const auto& shape = table.shape();
    os << "<g stroke=\"#000000\" stroke-width=\"2\" stroke-linecap=\"square\">\n";
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            const int c[2] = {x, y};
            const auto id = regions.region_at(shape.flat(c));
            if (y + 1 < n) {
                const int r[2] = {x, y + 1};
                if (regions.region_at(shape.flat(r)) != id)
                    os << "<line x1=\"" << margin + (y + 1) * px << "\" y1=\"" << margin + x * px << "\" x2=\""
                       << margin + (y + 1) * px << "\" y2=\"" << margin + (x + 1) * px << "\"/>\n";
            }
            if (x + 1 < n) {
                const int b[2] = {x + 1, y};
                if (regions.region_at(shape.flat(b)) != id)
                    os << "<line x1=\"" << margin + y * px << "\" y1=\"" << margin + (x + 1) * px << "\" x2=\""
                       << margin + (y + 1) * px << "\" y2=\"" << margin + (x + 1) * px << "\"/>\n";
            }
        }
    os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << n * px << "\" height=\"" << n * px
       << "\" fill=\"none\"/>\n";
    os << "</g>\n";

    if (overlay) {
        const auto run = run_protocol(*overlay, table);
        os << "<g stroke=\"#c0392b\" stroke-width=\"1.5\" stroke-dasharray=\"4 2\" fill=\"none\">\n";
        for (const auto& leaf : run.leaves) {
            const auto& r = leaf.rect;
            os << "<rect x=\"" << margin + r[1].lo * px + 2 << "\" y=\"" << margin + r[0].lo * px + 2 << "\" width=\""
               << r[1].length() * px - 4 << "\" height=\"" << r[0].length() * px - 4 << "\"/>\n";
        }
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace approxpriv
