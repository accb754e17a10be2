#include "mosacd/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "mosacd/error.hpp"

namespace mosacd {

Dataset::Dataset(std::vector<std::string> names, std::vector<std::vector<std::string>> levels,
                 std::vector<std::vector<int>> codes)
    : names_(std::move(names)), levels_(std::move(levels)), codes_(std::move(codes)) {
    if (levels_.size() != names_.size() || codes_.size() != names_.size())
        throw InputError("dataset column count mismatch");
    rows_ = codes_.empty() ? 0 : codes_.front().size();
    for (std::size_t c = 0; c < codes_.size(); ++c) {
        if (codes_[c].size() != rows_) throw InputError("dataset columns have different lengths");
        const int k = static_cast<int>(levels_[c].size());
        for (int code : codes_[c])
            if (code < 0 || code >= k) throw InputError("level code out of range in column '" + names_[c] + "'");
    }
}

int Dataset::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return -1;
}

Dataset Dataset::select(std::span<const std::string> names) const {
    std::vector<std::string> out_names;
    std::vector<std::vector<std::string>> out_levels;
    std::vector<std::vector<int>> out_codes;
    for (const auto& n : names) {
        const int c = find(n);
        if (c < 0) throw InputError("dataset has no column '" + n + "'");
        out_names.push_back(n);
        out_levels.push_back(levels_[c]);
        out_codes.push_back(codes_[c]);
    }
    return Dataset(std::move(out_names), std::move(out_levels), std::move(out_codes));
}

bool operator==(const Dataset& a, const Dataset& b) {
    if (a.names_ != b.names_ || a.rows_ != b.rows_) return false;
    for (int c = 0; c < a.columns(); ++c)
        for (std::size_t r = 0; r < a.rows_; ++r)
            if (a.label(r, c) != b.label(r, c)) return false;
    return true;
}

namespace {

/// Splits one CSV record (RFC 4180 quoting). Returns false at end of input.
bool next_record(std::istream& in, std::vector<std::string>& fields, int& line) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            ++line;
            fields.push_back(std::move(field));
            return true;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", line, 1);
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

bool needs_quotes(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos || s.empty();
}

void write_field(std::ostream& out, const std::string& s) {
    if (!needs_quotes(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

}  // namespace

Dataset read_csv(std::istream& in) {
    std::vector<std::string> header;
    int line = 1;
    if (!next_record(in, header, line)) throw ParseError("empty CSV: header row missing");
    {
        std::unordered_set<std::string> seen;
        for (const auto& h : header)
            if (!seen.insert(h).second) throw ParseError("duplicate CSV header '" + h + "'", 1, 1);
    }
    const std::size_t width = header.size();
    std::vector<std::vector<std::string>> levels(width);
    std::vector<std::unordered_map<std::string, int>> lookup(width);
    std::vector<std::vector<int>> codes(width);
    std::vector<std::string> fields;
    for (;;) {
        const int record_line = line;
        if (!next_record(in, fields, line)) break;
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        if (fields.size() != width)
            throw ParseError("ragged row: expected " + std::to_string(width) + " fields, found " +
                                 std::to_string(fields.size()),
                             record_line, 1);
        for (std::size_t c = 0; c < width; ++c) {
            auto [it, inserted] = lookup[c].emplace(fields[c], static_cast<int>(levels[c].size()));
            if (inserted) levels[c].push_back(fields[c]);
            codes[c].push_back(it->second);
        }
    }
    if (codes.empty() || codes.front().empty()) throw ParseError("CSV has a header but no data rows");
    return Dataset(std::move(header), std::move(levels), std::move(codes));
}

Dataset read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
    for (int c = 0; c < data.columns(); ++c) {
        if (c) out << ',';
        write_field(out, data.names()[c]);
    }
    out << '\n';
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (int c = 0; c < data.columns(); ++c) {
            if (c) out << ',';
            write_field(out, data.label(r, c));
        }
        out << '\n';
    }
}

void write_csv_file(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    write_csv(out, data);
}

}  // namespace mosacd
