#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "klra/matrix.hpp"
#include "klra/sparse.hpp"

namespace klra::io {

enum class MatrixFormat { auto_detect, matrix_market, csv };

using IngestedMatrix = std::variant<SparseMatrix, DenseMatrix>;

/// Parse a matrix file. Matrix Market coordinate files ingest as canonical
/// CSR (duplicates summed); array files and CSV ingest as dense. Parse
/// errors carry the offending line number.
IngestedMatrix read_matrix(const std::string& path,
                           MatrixFormat format = MatrixFormat::auto_detect);

IngestedMatrix read_matrix_market(std::istream& in,
                                  const std::string& name = "<stream>");
DenseMatrix read_csv(std::istream& in, const std::string& name = "<stream>");

SparseMatrix as_sparse(const IngestedMatrix& m);
DenseMatrix as_dense(const IngestedMatrix& m);

void write_matrix_market_array(std::ostream& out, const DenseMatrix& m);
void write_matrix_market_array(const std::string& path, const DenseMatrix& m);

}  // namespace klra::io
