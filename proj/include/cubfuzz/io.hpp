#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cubfuzz/fuzzy.hpp"
#include "cubfuzz/rating.hpp"

namespace cubfuzz {

/// Raw ratings matrix from a CSV file: a header of item names and n rows of
/// integer-or-missing cells.
struct RatingsTable {
  std::vector<std::string> item_names;
  std::vector<std::vector<std::optional<int>>> rows;

  int items() const { return static_cast<int>(item_names.size()); }
  long row_count() const { return static_cast<long>(rows.size()); }
};

/// Reads a comma-separated UTF-8 file with LF line endings; the first line
/// is the header, cells are integers or the token NA. Errors name the data
/// row and column and echo the offending cell text verbatim.
RatingsTable ingest_csv(const std::string& path);

/// Sample of item k (0-based) with missing cells dropped. Throws when a
/// present value falls outside 1..m (naming the cell) or when the item has
/// no observed ratings at all.
RatingSample item_sample(const RatingsTable& table, int k, const RatingScale& scale);

/// Listwise-complete rows (no missing cell anywhere), validated against the
/// scale. May be empty.
std::vector<std::vector<int>> complete_rows(const RatingsTable& table, const RatingScale& scale);

/// Writes a complete ratings matrix in the same dialect ingest_csv reads.
void write_ratings_csv(const std::string& path, const std::vector<std::string>& item_names,
                       const std::vector<std::vector<int>>& rows);

/// Reads IFS triples from any CSV carrying columns named mu, nu and u
/// (other columns ignored). A blank value in one of those columns is an
/// error naming the row (membership-only profiles carry no triple).
std::vector<IfsTriple> read_ifs_csv(const std::string& path);

/// Fixed 6-decimal rendering used by every emitted table.
std::string fmt6(double x);

}  // namespace cubfuzz
