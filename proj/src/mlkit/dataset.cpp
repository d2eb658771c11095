#include <trapdoor/mlkit/dataset.hpp>

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace trapdoor::mlkit {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw Error("dataset line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
}

} // namespace

std::size_t Dataset::count(int label) const {
    std::size_t n = 0;
    for (const auto& s : samples) n += s.label == label;
    return n;
}

void Dataset::validate() const {
    for (const auto& s : samples) {
        if (s.features.size() != dim()) {
            throw Error("sample " + s.token_id + " has " + std::to_string(s.features.size()) +
                        " features, expected " + std::to_string(dim()));
        }
        if (s.label != 0 && s.label != 1) throw Error("sample " + s.token_id + " label not 0/1");
    }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out{feature_names, {}};
    out.samples.reserve(indices.size());
    for (auto i : indices) out.samples.push_back(samples.at(i));
    return out;
}

std::string format_number(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ec == std::errc{} ? p : buf);
}

void write_csv(std::ostream& out, const Dataset& data) {
    out << "token_id,label";
    for (const auto& n : data.feature_names) out << ',' << n;
    out << '\n';
    for (const auto& s : data.samples) {
        out << s.token_id << ',' << s.label;
        for (double v : s.features) out << ',' << format_number(v);
        out << '\n';
    }
}

Dataset read_csv(std::istream& in) {
    Dataset d;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) return d;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_csv(line);
    if (header.size() < 2 || header[0] != "token_id" || header[1] != "label") {
        throw Error("dataset header must start with token_id,label");
    }
    d.feature_names.assign(header.begin() + 2, header.end());
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw Error("dataset line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " cells");
        }
        LabeledSample s;
        s.token_id = cells[0];
        s.label = static_cast<int>(parse_double(cells[1], line_no));
        for (std::size_t i = 2; i < cells.size(); ++i) s.features.push_back(parse_double(cells[i], line_no));
        d.samples.push_back(std::move(s));
    }
    d.validate();
    return d;
}

} // namespace trapdoor::mlkit
