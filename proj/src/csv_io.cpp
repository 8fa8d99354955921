#include "cenlad/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace cenlad {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open for writing: " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& text, const std::filesystem::path& path, std::size_t line_no) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": not a number: '" + text + "'");
  }
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open for reading: " + path.string());
  Table table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cells = split(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(table.header.size()) + " fields, got " +
                                         std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) row.push_back(parse_double(cell, path, line_no));
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw Error(ErrorCode::kParse, path.string() + ": missing header row");
  return table;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  auto out = open_out(path);
  out << "y,c";
  for (Eigen::Index j = 0; j < data.p(); ++j) out << ",x" << (j + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << format_double(data.y()[i]) << ',' << format_double(data.c()[i]);
    for (Eigen::Index j = 0; j < data.p(); ++j) out << ',' << format_double(data.X()(i, j));
    out << '\n';
  }
  finish(out, path);
}

Dataset read_dataset(const std::filesystem::path& path) {
  const Table table = read_table(path);
  const auto& h = table.header;
  if (h.size() < 3 || h[0] != "y" || h[1] != "c") {
    throw Error(ErrorCode::kParse, path.string() + ": header must be y,c,x1,...,xp");
  }
  for (std::size_t k = 2; k < h.size(); ++k) {
    if (h[k] != "x" + std::to_string(k - 1)) {
      throw Error(ErrorCode::kParse, path.string() + ": unexpected column '" + h[k] + "'");
    }
  }
  if (table.rows.empty()) throw Error(ErrorCode::kEmptyData, path.string() + ": no observations");
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto p = static_cast<Eigen::Index>(h.size() - 2);
  Matrix X(n, p);
  Vector y(n), c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    y[i] = row[0];
    c[i] = row[1];
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = row[static_cast<std::size_t>(j + 2)];
  }
  return Dataset(std::move(X), std::move(y), std::move(c));
}

void write_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  auto out = open_out(path);
  out << "j,beta0\n";
  for (Eigen::Index j = 0; j < truth.beta0.size(); ++j) out << (j + 1) << ',' << format_double(truth.beta0[j]) << '\n';
  finish(out, path);
}

GroundTruth read_truth(const std::filesystem::path& path) {
  const Table table = read_table(path);
  if (table.header != std::vector<std::string>{"j", "beta0"}) {
    throw Error(ErrorCode::kParse, path.string() + ": header must be j,beta0");
  }
  GroundTruth truth;
  truth.beta0 = Vector::Zero(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    if (table.rows[k][0] != static_cast<double>(k + 1)) {
      throw Error(ErrorCode::kParse, path.string() + ": j must run 1..p in order");
    }
    truth.beta0[static_cast<Eigen::Index>(k)] = table.rows[k][1];
  }
  truth.active_set = support(truth.beta0);
  return truth;
}

void write_coefficients(const std::filesystem::path& path, const Vector& beta, const std::string& comment) {
  auto out = open_out(path);
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "j,beta_hat\n";
  for (Eigen::Index j = 0; j < beta.size(); ++j) out << (j + 1) << ',' << format_double(beta[j]) << '\n';
  finish(out, path);
}

}  // namespace cenlad
