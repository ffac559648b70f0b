#include "klra/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace klra::io {

namespace {

[[noreturn]] void fail(const std::string& name, std::size_t line,
                       const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool next_content_line(std::istream& in, std::string& line,
                       std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto pos = line.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos) continue;
    if (line[pos] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

IngestedMatrix read_matrix_market(std::istream& in, const std::string& name) {
  std::size_t line_no = 0;
  std::string line;
  if (!std::getline(in, line)) fail(name, 1, "empty file");
  ++line_no;

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket")
    fail(name, line_no, "malformed header: expected %%MatrixMarket banner");
  object = lowercase(object);
  format = lowercase(format);
  field = lowercase(field);
  symmetry = lowercase(symmetry);
  if (object != "matrix")
    fail(name, line_no, "unsupported object '" + object + "'");
  if (format != "coordinate" && format != "array")
    fail(name, line_no, "unsupported format '" + format + "'");
  if (field != "real" && field != "integer" && field != "double")
    fail(name, line_no, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric")
    fail(name, line_no, "unsupported symmetry '" + symmetry + "'");

  if (!next_content_line(in, line, line_no))
    fail(name, line_no, "missing size line");
  std::istringstream size_line(line);

  if (format == "coordinate") {
    long long rows = -1, cols = -1, nnz = -1;
    if (!(size_line >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
      fail(name, line_no, "malformed coordinate size line");
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(nnz));
    for (long long e = 0; e < nnz; ++e) {
      if (!next_content_line(in, line, line_no))
        fail(name, line_no, "unexpected end of file: expected " +
                                std::to_string(nnz) + " entries");
      std::istringstream entry(line);
      long long i = 0, j = 0;
      double v = 0;
      if (!(entry >> i >> j >> v))
        fail(name, line_no, "malformed coordinate entry");
      if (i < 1 || i > rows || j < 1 || j > cols)
        fail(name, line_no, "entry index out of declared dimensions");
      const std::size_t r = static_cast<std::size_t>(i - 1);
      const std::size_t c = static_cast<std::size_t>(j - 1);
      trips.push_back({r, c, v});
      if (symmetry == "symmetric" && r != c) trips.push_back({c, r, v});
    }
    return SparseMatrix::from_triplets(static_cast<std::size_t>(rows),
                                       static_cast<std::size_t>(cols),
                                       std::move(trips));
  }

  long long rows = -1, cols = -1;
  if (!(size_line >> rows >> cols) || rows < 0 || cols < 0)
    fail(name, line_no, "malformed array size line");
  DenseMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  // Array files list entries in column-major order; symmetric files store
  // the lower triangle only.
  for (long long j = 0; j < cols; ++j) {
    const long long istart = symmetry == "symmetric" ? j : 0;
    for (long long i = istart; i < rows; ++i) {
      if (!next_content_line(in, line, line_no))
        fail(name, line_no, "unexpected end of file in array data");
      std::istringstream entry(line);
      double v = 0;
      if (!(entry >> v)) fail(name, line_no, "malformed array entry");
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
      if (symmetry == "symmetric")
        m(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
    }
  }
  if (!is_finite(m)) fail(name, line_no, "matrix contains non-finite values");
  return m;
}

DenseMatrix read_csv(std::istream& in, const std::string& name) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n,") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(name, line_no, "cannot parse cell '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(name, line_no, "ragged row: expected " +
                              std::to_string(rows.front().size()) +
                              " columns, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(name, line_no, "empty CSV");
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  if (!is_finite(m)) fail(name, line_no, "matrix contains non-finite values");
  return m;
}

IngestedMatrix read_matrix(const std::string& path, MatrixFormat format) {
  if (format == MatrixFormat::auto_detect) {
    const auto dot = path.rfind('.');
    const std::string ext =
        dot == std::string::npos ? "" : lowercase(path.substr(dot + 1));
    format = ext == "csv" ? MatrixFormat::csv : MatrixFormat::matrix_market;
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  if (format == MatrixFormat::csv) return read_csv(in, path);
  return read_matrix_market(in, path);
}

SparseMatrix as_sparse(const IngestedMatrix& m) {
  if (const auto* s = std::get_if<SparseMatrix>(&m)) return *s;
  return SparseMatrix::from_dense(std::get<DenseMatrix>(m));
}

DenseMatrix as_dense(const IngestedMatrix& m) {
  if (const auto* d = std::get_if<DenseMatrix>(&m)) return *d;
  return std::get<SparseMatrix>(m).to_dense();
}

void write_matrix_market_array(std::ostream& out, const DenseMatrix& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  out.precision(17);
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out << m(i, j) << "\n";
}

void write_matrix_market_array(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_matrix_market_array(out, m);
}

}  // namespace klra::io
