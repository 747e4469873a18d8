#pragma once

#include "nsi/harness.hpp"
#include "nsi/types.hpp"

#include <string>
#include <vector>

namespace nsi::io {

/// Parse a rectangular numeric CSV. A single leading header row is detected
/// (any cell that does not parse as a number) and skipped. Throws ParseError
/// with 1-based row/column coordinates on ragged or non-numeric input.
Matrix load_matrix_csv(const std::string& path);

/// A one-column (or one-row) matrix as a vector.
Vector load_vector_csv(const std::string& path);

/// Full-precision (round-trip exact) CSV writers.
void write_matrix_csv(const std::string& path, const Matrix& m);
void write_vector_csv(const std::string& path, const Vector& v);

enum class TableFormat { csv, markdown };

/// "mean(sd)" cell with 6 significant digits, the presentation format of the
/// aggregate tables.
std::string format_cell(double mean, double sd);

/// Write aggregate rows. CSV keeps mean and sd as separate full-precision
/// columns; markdown renders mean(sd) cells. Columns: setting, method, l2,
/// l1, FPR, TPR, NZ.
void emit_table(const std::vector<AggregateRow>& rows, const std::string& path,
                TableFormat format);

/// One JSON object per line, full precision; order is preserved.
void write_records_jsonl(const std::string& path, const std::vector<ReplicationRecord>& records);
std::vector<ReplicationRecord> read_records_jsonl(const std::string& path);

/// Experiment config in INI form ([section] key=value). Unknown sections or
/// keys raise ParseError naming the offender.
ExperimentSpec load_experiment_config(const std::string& path);

/// JSON (de)serialization of an experiment spec, used by run manifests.
std::string experiment_to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace nsi::io
