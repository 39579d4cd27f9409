#include "cubfuzz/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cubfuzz {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trimmed(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string cell_coords(const RatingsTable& table, long row, int col) {
  return "row " + std::to_string(row + 1) + ", column '" + table.item_names[static_cast<size_t>(col)] + "'";
}

}  // namespace

RatingsTable ingest_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || (lines.size() == 1 && trimmed(lines[0]).empty()))
    throw std::runtime_error("empty file " + path);

  RatingsTable table;
  for (const std::string& name : split_csv_line(lines[0])) {
    const std::string t = trimmed(name);
    if (t.empty())
      throw std::runtime_error(path + ": empty item name in header");
    table.item_names.push_back(t);
  }

  for (size_t li = 1; li < lines.size(); ++li) {
    if (trimmed(lines[li]).empty() && li + 1 == lines.size()) break;  // trailing newline
    const std::vector<std::string> cells = split_csv_line(lines[li]);
    if (cells.size() != table.item_names.size())
      throw std::runtime_error(path + ": row " + std::to_string(li) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(table.item_names.size()));
    std::vector<std::optional<int>> row;
    row.reserve(cells.size());
    for (size_t c = 0; c < cells.size(); ++c) {
      const std::string t = trimmed(cells[c]);
      if (t == "NA") {
        row.push_back(std::nullopt);
        continue;
      }
      int value = 0;
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
      if (ec != std::errc() || ptr != t.data() + t.size())
        throw std::runtime_error(path + ": row " + std::to_string(li) + ", column '" +
                                 table.item_names[c] + "': cell '" + cells[c] +
                                 "' is not an integer or NA");
      row.push_back(value);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw std::runtime_error(path + ": no data rows");
  return table;
}

RatingSample item_sample(const RatingsTable& table, int k, const RatingScale& scale) {
  if (k < 0 || k >= table.items())
    throw std::out_of_range("item index " + std::to_string(k) + " outside 0.." +
                            std::to_string(table.items() - 1));
  std::vector<int> ratings;
  ratings.reserve(table.rows.size());
  for (size_t j = 0; j < table.rows.size(); ++j) {
    const std::optional<int>& cell = table.rows[j][static_cast<size_t>(k)];
    if (!cell.has_value()) continue;
    if (*cell < 1 || *cell > scale.m)
      throw std::runtime_error(cell_coords(table, static_cast<long>(j), k) + ": rating " +
                               std::to_string(*cell) + " outside 1.." + std::to_string(scale.m));
    ratings.push_back(*cell);
  }
  if (ratings.empty())
    throw std::runtime_error("item '" + table.item_names[static_cast<size_t>(k)] +
                             "' has no observed ratings");
  return build_sample(ratings, scale);
}

std::vector<std::vector<int>> complete_rows(const RatingsTable& table, const RatingScale& scale) {
  std::vector<std::vector<int>> out;
  for (size_t j = 0; j < table.rows.size(); ++j) {
    std::vector<int> row;
    row.reserve(table.rows[j].size());
    bool complete = true;
    for (int k = 0; k < table.items(); ++k) {
      const std::optional<int>& cell = table.rows[j][static_cast<size_t>(k)];
      if (!cell.has_value()) {
        complete = false;
        break;
      }
      if (*cell < 1 || *cell > scale.m)
        throw std::runtime_error(cell_coords(table, static_cast<long>(j), k) + ": rating " +
                                 std::to_string(*cell) + " outside 1.." + std::to_string(scale.m));
      row.push_back(*cell);
    }
    if (complete) out.push_back(std::move(row));
  }
  return out;
}

void write_ratings_csv(const std::string& path, const std::vector<std::string>& item_names,
                       const std::vector<std::vector<int>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file " + path);
  for (size_t k = 0; k < item_names.size(); ++k)
    out << (k ? "," : "") << item_names[k];
  out << '\n';
  for (const std::vector<int>& row : rows) {
    if (row.size() != item_names.size())
      throw std::invalid_argument("row width differs from header width");
    for (size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<IfsTriple> read_ifs_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error("empty file " + path);
  const std::vector<std::string> header = split_csv_line(lines[0]);
  int col_mu = -1, col_nu = -1, col_u = -1;
  for (size_t c = 0; c < header.size(); ++c) {
    const std::string name = trimmed(header[c]);
    if (name == "mu") col_mu = static_cast<int>(c);
    else if (name == "nu") col_nu = static_cast<int>(c);
    else if (name == "u") col_u = static_cast<int>(c);
  }
  if (col_mu < 0 || col_nu < 0 || col_u < 0)
    throw std::runtime_error(path + ": header must contain columns mu, nu and u");

  std::vector<IfsTriple> triples;
  for (size_t li = 1; li < lines.size(); ++li) {
    if (trimmed(lines[li]).empty() && li + 1 == lines.size()) break;
    const std::vector<std::string> cells = split_csv_line(lines[li]);
    auto value_at = [&](int col, const char* name) {
      if (static_cast<size_t>(col) >= cells.size() || trimmed(cells[static_cast<size_t>(col)]).empty())
        throw std::runtime_error(path + ": row " + std::to_string(li) + ": empty " +
                                 std::string(name) + " (membership-only profile?)");
      const std::string t = trimmed(cells[static_cast<size_t>(col)]);
      try {
        size_t pos = 0;
        const double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument(t);
        return v;
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": row " + std::to_string(li) + ": cell '" + t +
                                 "' is not a number");
      }
    };
    triples.push_back(IfsTriple{value_at(col_mu, "mu"), value_at(col_nu, "nu"),
                                value_at(col_u, "u")});
  }
  if (triples.empty()) throw std::runtime_error(path + ": no data rows");
  return triples;
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return std::string(buf);
}

}  // namespace cubfuzz
