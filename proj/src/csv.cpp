#include "lets/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lets {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    while (ptr != last && (*ptr == ' ' || *ptr == '\t')) ++ptr;
    require(ec == std::errc() && ptr == last, ErrorCode::IoError,
            "bad numeric field '" + s + "' on line " + std::to_string(line_no));
    return value;
}

} // namespace

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::IoError,
            "dataset is empty, expected a header row");
    auto header = split_line(line);
    require(header.size() >= 2, ErrorCode::IoError, "header needs f1..fd and z columns");
    require(header.back() == "z", ErrorCode::IoError, "last header column must be 'z'");
    const std::size_t dim = header.size() - 1;
    for (std::size_t j = 0; j < dim; ++j) {
        require(header[j] == "f" + std::to_string(j + 1), ErrorCode::IoError,
                "feature columns must be named f1..fd in order");
    }

    Dataset data;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_line(line);
        require(fields.size() == dim + 1, ErrorCode::IoError,
                "line " + std::to_string(line_no) + " has wrong column count");
        FeatureVector f(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            f[j] = parse_double(fields[j], line_no);
            require(std::isfinite(f[j]), ErrorCode::IoError,
                    "non-finite feature on line " + std::to_string(line_no));
        }
        double zf = parse_double(fields[dim], line_no);
        require(zf == 0.0 || zf == 1.0, ErrorCode::IoError,
                "label must be 0 or 1 on line " + std::to_string(line_no));
        data.features.push_back(std::move(f));
        data.labels.push_back(static_cast<Label>(zf));
    }
    require(!data.features.empty(), ErrorCode::IoError, "dataset has no rows");
    return data;
}

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::IoError, "cannot open dataset file " + path);
    return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    require(!data.features.empty(), ErrorCode::InvalidArgument, "nothing to write");
    require(data.features.size() == data.labels.size(), ErrorCode::LengthMismatch,
            "feature/label counts differ");
    const std::size_t dim = data.features[0].size();
    for (std::size_t j = 0; j < dim; ++j) out << 'f' << (j + 1) << ',';
    out << "z\n";
    for (std::size_t i = 0; i < data.features.size(); ++i) {
        require(data.features[i].size() == dim, ErrorCode::DimensionMismatch,
                "rows must share one dimension");
        for (double x : data.features[i]) out << format_double(x) << ',';
        out << data.labels[i] << '\n';
    }
}

void save_dataset_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    require(out.good(), ErrorCode::IoError, "cannot open output file " + path);
    write_dataset_csv(out, data);
    out.flush();
    require(out.good(), ErrorCode::IoError, "failed writing " + path);
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    require(ec == std::errc(), ErrorCode::Internal, "double formatting failed");
    return std::string(buf, ptr);
}

} // namespace lets
