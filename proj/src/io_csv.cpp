#include "gepbench/io_csv.hpp"

#include "gepbench/io_binary.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace gepbench {

namespace {

void write_double(std::ostream& out, double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general,
                                   std::numeric_limits<double>::max_digits10);
    out.write(buf, res.ptr - buf);
}

std::vector<std::string> split_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back(); // CRLF input
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::schema, "CSV: bad number '" + s + "' in " + where);
    }
}

} // namespace

void save_dataset_csv(const LabeledDataset& data,
                      const std::filesystem::path& path) {
    data.validate();
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open for writing: " + path.string());
    for (std::size_t j = 0; j < data.n_features(); ++j) out << "f" << j << ",";
    out << "label\n";
    for (std::size_t i = 0; i < data.n_samples(); ++i) {
        for (std::size_t j = 0; j < data.n_features(); ++j) {
            write_double(out, data.features(i, j));
            out << ",";
        }
        out << data.labels[i] << "\n";
    }
    if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

LabeledDataset load_dataset_csv(const std::filesystem::path& path,
                                int n_classes_hint) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::missing_file, "cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line))
        fail(ErrorKind::schema, "CSV: empty file " + path.string());
    const auto header = split_line(line);
    if (header.size() < 2 || header.back() != "label")
        fail(ErrorKind::schema,
             "CSV: expected header f0,...,label in " + path.string());
    const std::size_t d = header.size() - 1;
    for (std::size_t j = 0; j < d; ++j)
        if (header[j] != "f" + std::to_string(j))
            fail(ErrorKind::schema,
                 "CSV: header column " + std::to_string(j) + " is '" +
                     header[j] + "', expected f" + std::to_string(j));

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != d + 1)
            fail(ErrorKind::schema,
                 "CSV: line " + std::to_string(lineno) + " has " +
                     std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(d + 1));
        std::vector<double> row(d);
        for (std::size_t j = 0; j < d; ++j)
            row[j] = parse_double(cells[j], "line " + std::to_string(lineno));
        rows.push_back(std::move(row));
        labels.push_back(static_cast<int>(
            parse_double(cells[d], "line " + std::to_string(lineno))));
    }
    if (rows.empty())
        fail(ErrorKind::schema, "CSV: no data rows in " + path.string());

    LabeledDataset data;
    data.features = Matrix::from_rows(rows);
    data.labels = std::move(labels);
    int max_label = 0;
    for (int l : data.labels) max_label = std::max(max_label, l);
    data.n_classes = std::max(n_classes_hint, max_label + 1);
    data.provenance = "csv:" + path.filename().string();
    data.validate();
    return data;
}

void save_scores_csv(const ScoreVector& scores,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open for writing: " + path.string());
    out << "sample_index,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out << i << ",";
        write_double(out, scores.scores[i]);
        out << "\n";
    }
    if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

std::vector<double> load_scores_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::missing_file, "cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line) || split_line(line) !=
                                       std::vector<std::string>{"sample_index",
                                                                "score"})
        fail(ErrorKind::schema,
             "scores CSV: expected header sample_index,score in " +
                 path.string());
    std::vector<double> scores;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != 2)
            fail(ErrorKind::schema,
                 "scores CSV: line " + std::to_string(lineno) + " malformed");
        scores.push_back(
            parse_double(cells[1], "line " + std::to_string(lineno)));
    }
    if (scores.empty())
        fail(ErrorKind::schema, "scores CSV: no rows in " + path.string());
    return scores;
}


void save_scores_gepb(const ScoreVector& scores,
                      const std::filesystem::path& path) {
    Matrix m(scores.size(), 1);
    for (std::size_t i = 0; i < scores.size(); ++i)
        m(i, 0) = scores.scores[i];
    write_matrix(m, path);
}

std::vector<double> load_scores_gepb(const std::filesystem::path& path) {
    const Matrix m = read_matrix(path);
    if (m.cols() != 1)
        fail(ErrorKind::shape_mismatch,
             "scores file " + path.string() + ": expected one column, got " +
                 std::to_string(m.cols()));
    std::vector<double> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = m(i, 0);
    return out;
}

} // namespace gepbench

