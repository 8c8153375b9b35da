#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace olg {

// Tile alphabet. The order fixes the argmax tie-break in the linear decoder:
// lowest index wins.
inline constexpr std::string_view kTileAlphabet = "-X#oE|";

inline bool is_tile(char c) { return kTileAlphabet.find(c) != std::string_view::npos; }

inline int tile_index(char c) {
    auto pos = kTileAlphabet.find(c);
    if (pos == std::string_view::npos)
        throw std::invalid_argument(std::string("unknown tile character '") + c + "'");
    return static_cast<int>(pos);
}

// One fixed-size tile grid slice of a level. Row 0 is the top.
struct Segment {
    int rows = 0;
    int cols = 0;
    std::string cells; // row-major, rows*cols characters

    Segment() = default;
    Segment(int r, int c, char fill = '-')
        : rows(r), cols(c), cells(static_cast<std::size_t>(r) * c, fill) {}

    char at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c]; }
    char& at(int r, int c) { return cells[static_cast<std::size_t>(r) * cols + c]; }

    bool operator==(const Segment&) const = default;

    void validate() const {
        if (rows < 1 || cols < 1) throw std::invalid_argument("Segment: empty grid");
        if (cells.size() != static_cast<std::size_t>(rows) * cols)
            throw std::invalid_argument("Segment: cell count mismatch");
        for (char c : cells)
            if (!is_tile(c)) throw std::invalid_argument("Segment: unknown tile character");
    }
};

using Level = std::vector<Segment>;

// Text format: H rows of the segments rendered side by side, followed by a
// marker row with '+' at the first column of each segment and '=' elsewhere.
// The marker row carries the segment width, so the format is self-describing.
inline std::string level_to_text(const Level& level) {
    if (level.empty()) throw std::invalid_argument("level_to_text: empty level");
    int rows = level.front().rows;
    int cols = level.front().cols;
    for (const auto& seg : level) {
        seg.validate();
        if (seg.rows != rows || seg.cols != cols)
            throw std::invalid_argument("level_to_text: segment dimensions differ");
    }
    std::string out;
    out.reserve(static_cast<std::size_t>(rows + 1) * (level.size() * cols + 1));
    for (int r = 0; r < rows; ++r) {
        for (const auto& seg : level)
            out.append(seg.cells, static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols));
        out.push_back('\n');
    }
    for (std::size_t s = 0; s < level.size(); ++s) {
        out.push_back('+');
        out.append(static_cast<std::size_t>(cols) - 1, '=');
    }
    out.push_back('\n');
    return out;
}

inline Level text_to_level(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> rows;
    std::string line;
    std::string marker;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '+') {
            marker = line;
            break;
        }
        rows.push_back(line);
    }
    if (rows.empty() || marker.empty())
        throw std::invalid_argument("text_to_level: missing rows or marker row");
    std::size_t width = rows.front().size();
    if (marker.size() != width)
        throw std::invalid_argument("text_to_level: marker row width mismatch");
    for (const auto& r : rows)
        if (r.size() != width) throw std::invalid_argument("text_to_level: ragged rows");
    // Segment starts are the '+' positions.
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < marker.size(); ++i) {
        if (marker[i] == '+') starts.push_back(i);
        else if (marker[i] != '=')
            throw std::invalid_argument("text_to_level: bad marker row");
    }
    if (starts.empty() || starts.front() != 0)
        throw std::invalid_argument("text_to_level: marker row must start with '+'");
    std::size_t cols = starts.size() > 1 ? starts[1] - starts[0] : width;
    for (std::size_t s = 0; s < starts.size(); ++s)
        if (starts[s] != s * cols) throw std::invalid_argument("text_to_level: uneven segment widths");
    if (starts.size() * cols != width)
        throw std::invalid_argument("text_to_level: trailing columns");

    Level level;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        Segment seg(static_cast<int>(rows.size()), static_cast<int>(cols));
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < cols; ++c)
                seg.at(static_cast<int>(r), static_cast<int>(c)) = rows[r][starts[s] + c];
        seg.validate();
        level.push_back(std::move(seg));
    }
    return level;
}

} // namespace olg
