#ifndef KISAN_IO_HPP
#define KISAN_IO_HPP

// CSV ingestion for the crop, fertilizer and market-price corpora, dataset
// fingerprints, and exact decimal formatting of doubles.
//
// Files are UTF-8, comma-separated, with a mandatory header row. Columns are
// matched by name; missing, duplicate or unknown columns are rejected, as are
// empty or non-numeric cells. Errors name the 1-based data row.

#include <kisan/advisory.hpp>
#include <kisan/forecast.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>

namespace kisan {

// Shortest decimal string that parses back to the same double.
inline std::string format_exact(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error("cannot format value");
    return {buf, end};
}

inline double parse_exact(std::string_view s) {
    double v = 0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError("'" + std::string(s) + "' is not a number");
    return v;
}

// 64-bit FNV-1a, used for dataset fingerprints and bundle checksums.
class Fnv1a {
public:
    void update(std::string_view s) {
        for (unsigned char c : s) {
            hash_ ^= c;
            hash_ *= 0x100000001b3ULL;
        }
    }
    std::uint64_t value() const noexcept { return hash_; }
    std::string hex() const {
        std::ostringstream os;
        os << std::hex << std::setw(16) << std::setfill('0') << hash_;
        return os.str();
    }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

struct DatasetFingerprint {
    std::string name;
    std::size_t rows = 0;
    std::size_t classes = 0;
    std::string content_hash;

    bool operator==(const DatasetFingerprint&) const = default;
};

inline DatasetFingerprint fingerprint(const LabeledDataset& dataset, std::string name = {}) {
    Fnv1a h;
    h.update(dataset.schema().id);
    for (const auto& f : dataset.schema().feature_names) h.update("|" + f);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        h.update("\n");
        for (double v : dataset.row(i)) h.update(format_exact(v) + ",");
        h.update(dataset.label_name(i));
    }
    return {std::move(name), dataset.size(), dataset.num_classes(), "fnv1a64:" + h.hex()};
}

// ------------------------------------------------------------ CSV reader

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

// Parsed CSV with columns resolved against an expected set.
class CsvTable {
public:
    CsvTable(std::istream& in, const std::vector<std::string>& expected, const std::string& source) : source_(source) {
        std::string line;
        if (!std::getline(in, line)) throw DataError(source_ + ": missing header row");
        if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        const auto header = split_csv_line(line);
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (std::find(expected.begin(), expected.end(), header[i]) == expected.end())
                throw DataError(source_ + ": unknown column '" + header[i] + "'");
            if (column_.count(header[i])) throw DataError(source_ + ": duplicate column '" + header[i] + "'");
            column_[header[i]] = i;
        }
        for (const auto& e : expected)
            if (!column_.count(e)) throw DataError(source_ + ": header is missing column '" + e + "'");
        width_ = header.size();

        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            auto cells = split_csv_line(line);
            const auto row_no = rows_.size() + 1;
            if (cells.size() != width_)
                throw DataError(source_ + ": row " + std::to_string(row_no) + ": expected " + std::to_string(width_) +
                                " fields, got " + std::to_string(cells.size()));
            for (std::size_t i = 0; i < cells.size(); ++i)
                if (cells[i].empty())
                    throw DataError(source_ + ": row " + std::to_string(row_no) + ": empty field '" + header[i] + "'");
            rows_.push_back(std::move(cells));
        }
    }

    std::size_t size() const noexcept { return rows_.size(); }

    const std::string& text(std::size_t row, const std::string& column) const {
        return rows_[row][column_.at(column)];
    }

    double number(std::size_t row, const std::string& column) const {
        double v;
        try {
            v = parse_exact(text(row, column));
        } catch (const DataError&) {
            throw DataError(source_ + ": row " + std::to_string(row + 1) + ": column '" + column +
                            "' is not numeric ('" + text(row, column) + "')");
        }
        if (!std::isfinite(v))
            throw DataError(source_ + ": row " + std::to_string(row + 1) + ": column '" + column + "' is not finite");
        return v;
    }

    int integer(std::size_t row, const std::string& column) const {
        const auto& s = text(row, column);
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size())
            throw DataError(source_ + ": row " + std::to_string(row + 1) + ": column '" + column +
                            "' is not an integer ('" + s + "')");
        return v;
    }

    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
    std::map<std::string, std::size_t> column_;
    std::size_t width_ = 0;
    std::vector<std::vector<std::string>> rows_;
};

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

}  // namespace detail

// ------------------------------------------------------------ crop corpus

inline LabeledDataset read_crop_dataset(std::istream& in, bool with_price, const std::string& source = "<stream>") {
    const auto schema = with_price ? benchmark_schema() : agronomic_schema();
    auto expected = schema.feature_names;
    expected.push_back("label");
    const detail::CsvTable table(in, expected, source);
    Matrix x(0, schema.arity());
    std::vector<std::string> labels;
    std::vector<double> row(schema.arity());
    for (std::size_t r = 0; r < table.size(); ++r) {
        for (std::size_t j = 0; j < schema.arity(); ++j) row[j] = table.number(r, schema.feature_names[j]);
        x.push_row(row);
        labels.push_back(table.text(r, "label"));
    }
    return LabeledDataset(schema, std::move(x), labels);
}

inline LabeledDataset load_crop_dataset(const std::filesystem::path& path, bool with_price) {
    auto in = detail::open_input(path);
    return read_crop_dataset(in, with_price, path.string());
}

// ------------------------------------------------------ fertilizer corpus

struct FertilizerDataset {
    LabeledDataset data;
    std::vector<std::string> soil_types;  // sorted; one-hot column order
};

inline FertilizerDataset read_fertilizer_dataset(std::istream& in, const std::string& source = "<stream>") {
    const std::vector<std::string> numeric{"N", "P", "K", "moisture", "temperature"};
    const detail::CsvTable table(in, {"N", "P", "K", "soil_type", "moisture", "temperature", "label"}, source);
    std::set<std::string> soils;
    for (std::size_t r = 0; r < table.size(); ++r) soils.insert(table.text(r, "soil_type"));
    FertilizerDataset out;
    out.soil_types.assign(soils.begin(), soils.end());
    const auto schema = fertilizer_schema(out.soil_types);
    Matrix x(0, schema.arity());
    std::vector<std::string> labels;
    for (std::size_t r = 0; r < table.size(); ++r) {
        FertilizerInput input{table.number(r, "N"),        table.number(r, "P"),
                              table.number(r, "K"),        table.text(r, "soil_type"),
                              table.number(r, "moisture"), table.number(r, "temperature")};
        x.push_row(encode_fertilizer_input(out.soil_types, input));
        labels.push_back(table.text(r, "label"));
    }
    out.data = LabeledDataset(schema, std::move(x), labels);
    return out;
}

inline FertilizerDataset load_fertilizer_dataset(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return read_fertilizer_dataset(in, path.string());
}

// ---------------------------------------------------------- market prices

inline std::map<std::string, PriceSeries> read_market_history(std::istream& in, const std::string& source = "<stream>") {
    const detail::CsvTable table(in, {"crop", "month", "year", "price"}, source);
    std::map<std::string, PriceSeries> out;
    for (std::size_t r = 0; r < table.size(); ++r) {
        const auto& crop = table.text(r, "crop");
        PricePoint p{table.integer(r, "year"), table.integer(r, "month"), table.number(r, "price")};
        const auto where = source + ": row " + std::to_string(r + 1) + ": ";
        if (p.month < 1 || p.month > 12) throw DataError(where + "month " + std::to_string(p.month) + " outside 1-12");
        if (!(p.price > 0)) throw DataError(where + "price must be positive");
        auto& series = out[crop];
        series.crop_id = crop;
        series.points.push_back(p);
    }
    for (auto& [crop, series] : out) {
        std::stable_sort(series.points.begin(), series.points.end(), [](const PricePoint& a, const PricePoint& b) {
            return month_index(a.year, a.month) < month_index(b.year, b.month);
        });
        for (std::size_t i = 1; i < series.points.size(); ++i) {
            const auto& p = series.points[i];
            if (month_index(p.year, p.month) == month_index(series.points[i - 1].year, series.points[i - 1].month))
                throw DataError(source + ": duplicate entry for (" + crop + ", " + std::to_string(p.year) + ", " +
                                std::to_string(p.month) + ")");
        }
    }
    return out;
}

inline std::map<std::string, PriceSeries> load_market_history(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return read_market_history(in, path.string());
}

// ----------------------------------------------------------------- writers

inline void write_crop_dataset(std::ostream& out, const LabeledDataset& dataset) {
    for (const auto& f : dataset.schema().feature_names) out << f << ',';
    out << "label\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (double v : dataset.row(i)) out << format_exact(v) << ',';
        out << dataset.label_name(i) << '\n';
    }
}

inline void write_fertilizer_dataset(std::ostream& out, const FertilizerDataset& dataset) {
    out << "N,P,K,soil_type,moisture,temperature,label\n";
    const auto& d = dataset.data;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto row = d.row(i);
        std::string soil;
        for (std::size_t s = 0; s < dataset.soil_types.size(); ++s)
            if (row[5 + s] == 1.0) soil = dataset.soil_types[s];
        out << format_exact(row[0]) << ',' << format_exact(row[1]) << ',' << format_exact(row[2]) << ',' << soil << ','
            << format_exact(row[3]) << ',' << format_exact(row[4]) << ',' << d.label_name(i) << '\n';
    }
}

inline void write_market_history(std::ostream& out, const std::map<std::string, PriceSeries>& history) {
    out << "crop,month,year,price\n";
    for (const auto& [crop, series] : history)
        for (const auto& p : series.points) out << crop << ',' << p.month << ',' << p.year << ',' << format_exact(p.price) << '\n';
}

}  // namespace kisan

#endif  // KISAN_IO_HPP
