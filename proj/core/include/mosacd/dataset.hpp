#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mosacd {

/// Column-oriented categorical table. Each column stores level codes into its label list.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<std::string> names, std::vector<std::vector<std::string>> levels,
            std::vector<std::vector<int>> codes);

    std::size_t rows() const noexcept { return rows_; }
    int columns() const noexcept { return static_cast<int>(names_.size()); }

    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<std::string>& levels(int col) const { return levels_.at(col); }
    int cardinality(int col) const { return static_cast<int>(levels_.at(col).size()); }
    std::span<const int> column(int col) const { return codes_.at(col); }
    const std::string& label(std::size_t row, int col) const { return levels_[col][codes_[col][row]]; }

    /// Column index for `name`, or -1.
    int find(std::string_view name) const;

    /// Columns reordered (and possibly subset) to match `names`; throws InputError on a miss.
    Dataset select(std::span<const std::string> names) const;

    /// Label-wise equality: same names and same cell labels, whatever the level order.
    friend bool operator==(const Dataset& a, const Dataset& b);

private:
    std::vector<std::string> names_;
    std::vector<std::vector<std::string>> levels_;
    std::vector<std::vector<int>> codes_;
    std::size_t rows_ = 0;
};

/// Header row mandatory; every cell is a categorical token. Levels are numbered in order of
/// first appearance. Throws ParseError on ragged rows, duplicate headers or zero data rows.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::filesystem::path& path);

void write_csv(std::ostream& out, const Dataset& data);
void write_csv_file(const std::filesystem::path& path, const Dataset& data);

}  // namespace mosacd
