#include "scenestat/features.hpp"

#include <fstream>
#include <sstream>

namespace scenestat {

// Version 1 comparison pattern, mirrored in data/descriptor_pattern_v1.txt.
static const DescriptorPattern kPatternV1 = {{
    {-4, 2, -8, -10}, {-8, 3, -7, 6}, {-5, -1, 9, -9}, {-12, 3, 6, -5},
    {2, -5, 10, 4}, {3, -9, -10, -13}, {-8, -13, 13, -10}, {-11, 4, 5, 5},
    {-1, -5, 10, -1}, {-9, 4, -4, 1}, {-4, 8, -1, 2}, {-4, 1, 12, 2},
    {-6, 10, -9, -13}, {4, -2, -6, -13}, {-6, 6, 8, -8}, {-11, 10, 3, -10},
    {-7, 8, 5, 2}, {12, 3, -6, -6}, {0, 2, 10, 0}, {5, 7, 4, 0},
    {-10, -6, -8, 8}, {5, 8, -12, 7}, {-3, -6, -1, -10}, {6, 3, 1, 3},
    {-9, -11, 5, 13}, {8, -9, 7, -10}, {11, 13, -2, -7}, {4, -12, 12, -4},
    {1, 12, 10, 13}, {-12, -6, 13, 9}, {7, 10, 11, 12}, {0, -1, 7, -3},
    {-13, 7, -8, 6}, {13, 3, -13, 10}, {9, 13, -1, 12}, {6, 5, -13, 2},
    {7, 9, -8, -11}, {4, -8, 12, 10}, {11, -2, -1, -13}, {4, -3, 2, -7},
    {9, -8, 2, -11}, {4, -2, -3, 7}, {11, -6, 4, -3}, {-8, 4, -13, 10},
    {-5, -3, -3, -6}, {3, -11, -8, -13}, {-4, 2, 5, 6}, {9, 1, -13, 6},
    {-12, 8, -8, -13}, {11, -5, 7, 8}, {-11, -12, 11, 3}, {2, 4, -2, -10},
    {5, 2, 7, 13}, {11, -13, 11, 13}, {-9, -9, 13, -7}, {-2, 6, -3, 8},
    {-7, -3, 1, 13}, {-8, 12, -5, 11}, {2, 7, -8, 0}, {-11, 2, 7, -12},
    {3, 9, 11, 2}, {5, -2, -12, -7}, {-3, -13, 9, 6}, {-10, 1, 10, -3},
    {4, -7, -10, -4}, {-7, 6, -2, 6}, {-2, 10, 6, -4}, {9, -1, 5, 4},
    {-5, 12, 5, 0}, {-1, 8, 5, 1}, {4, 2, 10, 8}, {11, -13, 4, -6},
    {12, 0, 0, 3}, {11, -3, 5, -3}, {2, -4, 4, -13}, {3, -13, -10, -3},
    {-9, 10, 0, -1}, {-12, -4, 0, -3}, {-11, 11, 10, 0}, {10, -4, 12, -1},
    {11, 10, -7, 2}, {8, 9, -9, 12}, {13, 4, -2, -13}, {6, 2, -11, -6},
    {-4, -8, 13, -1}, {-8, -4, 10, 12}, {9, -7, -3, -10}, {-12, -9, 8, -3},
    {-12, -7, 7, 6}, {7, -13, -9, 1}, {9, 3, 11, -4}, {5, -1, 5, 10},
    {1, 9, 1, 10}, {-6, -1, 9, 12}, {-9, 2, -4, -9}, {4, -8, 1, -1},
    {11, 10, 4, 10}, {12, -2, -10, 7}, {-2, -9, -10, -13}, {-9, 6, -6, -12},
    {9, 4, 0, 5}, {2, 0, 1, -2}, {5, -13, -6, 11}, {-10, 10, -4, 11},
    {2, -10, 10, -4}, {-3, -1, -3, -4}, {2, 1, -13, 11}, {2, -11, 5, -7},
    {-3, 2, 9, 7}, {11, 0, 13, -12}, {-10, -12, 5, -1}, {13, 8, -9, 10},
    {-5, -3, -1, -3}, {-13, -10, -11, 12}, {-8, -8, 9, 4}, {0, 2, 5, 1},
    {2, 3, 10, 11}, {3, -5, -1, -1}, {-7, 11, 11, -11}, {4, -13, 10, -11},
    {5, -12, -10, 6}, {5, 1, 5, -8}, {11, -4, 3, -5}, {9, 3, -10, -10},
    {-10, -3, -3, -2}, {-3, 0, 8, -4}, {5, -6, -4, 0}, {-8, -4, 3, 2},
    {13, -8, 13, 12}, {-13, -9, 4, 0}, {-7, -9, -2, -11}, {-12, -2, -10, -7},
    {4, -12, 11, -5}, {-8, -1, -5, -4}, {5, 7, 0, -3}, {-7, 4, -3, -4},
    {1, -9, 2, -2}, {9, 4, 9, -8}, {3, 9, -3, -11}, {8, -10, -8, -11},
    {-1, -12, -12, -6}, {-3, -5, 2, -4}, {10, 5, -9, -10}, {4, -10, -3, -4},
    {-5, 12, -6, 13}, {-13, -5, 10, -6}, {6, -2, -2, -2}, {2, 1, -5, 4},
    {5, 4, -10, 1}, {6, -1, -11, -1}, {4, -10, 3, 8}, {-8, 2, -13, 13},
    {4, -7, -2, 10}, {-3, -6, -9, -8}, {-9, -6, 7, 3}, {-11, -12, -3, -12},
    {-5, 9, -3, 4}, {-2, -7, -13, -4}, {-3, -1, 2, 13}, {-6, -4, 13, -11},
    {13, -2, -11, 11}, {-2, -13, 9, 13}, {5, 11, -13, -13}, {7, 5, 10, 3},
    {11, 3, 8, -7}, {6, -1, 6, 4}, {-2, 12, 8, 10}, {-8, -11, -4, -4},
    {0, 5, -13, -11}, {1, -9, 11, 7}, {-3, 8, 1, 13}, {-4, 0, -2, 11},
    {0, 6, -12, -13}, {-3, 10, 2, 4}, {1, -7, -3, 13}, {-3, 1, -4, 10},
    {8, -2, -8, 7}, {12, -13, 4, 8}, {6, -6, 4, 9}, {-11, 12, 13, -8},
    {-2, -6, -8, 12}, {-6, 1, 4, 1}, {12, 3, -5, 11}, {-13, 4, -13, -2},
    {6, 4, 1, 11}, {12, 13, 13, -10}, {9, -4, -2, 5}, {2, -4, 7, -10},
    {6, -4, 13, -12}, {10, -11, 2, -11}, {-6, -11, -13, -12}, {-2, 13, 5, 4},
    {10, 11, -2, -12}, {12, 8, 8, -13}, {-10, 2, 10, 2}, {-2, -13, 4, -11},
    {4, -7, 4, -4}, {13, -4, 4, -10}, {-3, 3, -4, 4}, {13, 2, -3, 6},
    {-2, 11, 8, 6}, {12, 12, -2, 3}, {3, -13, 3, 0}, {13, 9, -4, 7},
    {4, -8, 13, 2}, {4, -8, 6, 13}, {9, 6, 6, 9}, {-4, -3, 4, 8},
    {7, -5, 2, -1}, {4, -6, -8, -8}, {-3, -8, 0, 13}, {-6, 7, 2, -7},
    {1, 11, -12, -2}, {8, -12, 1, -8}, {6, -13, 3, 9}, {-9, 9, -7, -6},
    {2, 0, -10, 7}, {-11, 2, 4, 4}, {10, -9, 3, 1}, {-8, 10, -3, 3},
    {-2, 4, 5, -4}, {-2, -3, 7, -9}, {-7, 2, 5, 1}, {-13, 12, -7, 4},
    {-3, 12, 0, -3}, {7, 2, 8, -5}, {0, 9, 6, 11}, {4, -8, 8, -3},
    {-10, -2, -6, -9}, {-9, -4, -6, -4}, {10, -7, 9, -8}, {-4, 8, 8, 8},
    {-13, -1, -2, -1}, {5, 6, -8, 1}, {11, 11, 4, 9}, {-7, 5, 11, -7},
    {4, 2, -5, -7}, {13, -4, 1, -6}, {-7, -9, 3, 7}, {2, -7, -9, -1},
    {-3, 8, 4, 4}, {12, -1, 1, 1}, {-3, 2, 3, -7}, {-5, 11, -9, 2},
    {-12, 2, 1, -5}, {-3, 10, -8, 12}, {2, 13, -12, 12}, {0, 10, 3, 8},
    {-12, 3, -8, -11}, {11, -6, -1, -4}, {1, -11, 13, -9}, {10, 7, 11, 10},
    {13, -11, -12, -6}, {5, 12, -13, -12}, {3, 2, 3, 8}, {13, 2, 8, 5},
}};

const DescriptorPattern& descriptor_pattern_v1() { return kPatternV1; }

DescriptorPattern load_descriptor_pattern(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io_error, "cannot read pattern table '" + path.string() + "'");
    DescriptorPattern pattern{};
    std::string line;
    size_t row = 0;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        int ax, ay, bx, by;
        if (!(fields >> ax >> ay >> bx >> by)) continue;
        if (row >= pattern.size()) raise(ErrorCode::invalid_value, "pattern table has extra rows");
        for (int v : {ax, ay, bx, by}) {
            if (v < -13 || v > 13) raise(ErrorCode::invalid_value, "pattern offset out of [-13, 13]");
        }
        pattern[row++] = PatternTest{static_cast<int8_t>(ax), static_cast<int8_t>(ay),
                                     static_cast<int8_t>(bx), static_cast<int8_t>(by)};
    }
    if (row != pattern.size()) {
        raise(ErrorCode::invalid_value,
              "pattern table has " + std::to_string(row) + " rows, expected 256");
    }
    return pattern;
}

}  // namespace scenestat
