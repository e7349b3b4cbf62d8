#include "grnsp/cli/table.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "grnsp/errors.hpp"

namespace grnsp::cli {

namespace {

bool needs_quotes(const std::string& s) {
  return s.empty() || s.find_first_of(",\"\n\r") != std::string::npos || s.front() == '#' ||
         s.front() == ' ' || s.back() == ' ';
}

std::string csv_field(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_real(*d);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t& pos, const std::string& text) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false, was_quoted = false;
  std::size_t i = pos;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
      was_quoted = false;
    } else if (c == '\n') {
      break;
    } else {
      field += c;
    }
  }
  if (quoted) throw ValidationError("parse_csv: unterminated quoted field");
  out.push_back(field);
  pos = i + 1;
  (void)line;
  return out;
}

bool parse_int(const std::string& s, std::int64_t& v) {
  if (s.empty()) return false;
  std::size_t k = (s[0] == '-') ? 1 : 0;
  if (k == s.size()) return false;
  for (std::size_t i = k; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  errno = 0;
  v = std::strtoll(s.c_str(), nullptr, 10);
  // canonical spelling only, so that re-serialising reproduces the text
  return errno == 0 && std::to_string(v) == s;
}

bool parse_real(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && format_real(v) == s;
}

}  // namespace

ResultTable::ResultTable(std::string name, std::vector<Column> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (columns_[i].name == columns_[j].name)
        throw ValidationError("table " + name_ + ": duplicate column '" + columns_[i].name + "'");
}

bool ResultTable::has_status_column() const {
  for (const Column& c : columns_)
    if (c.name == "status") return true;
  return false;
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  throw ValidationError("table " + name_ + ": no column '" + name + "'");
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    std::ostringstream msg;
    msg << "table " << name_ << ": row has " << row.size() << " cells, schema has "
        << columns_.size();
    throw ValidationError(msg.str());
  }
  const bool status = has_status_column();
  for (std::size_t i = 0; i < row.size(); ++i) {
    const Column& col = columns_[i];
    Cell& c = row[i];
    switch (col.type) {
      case ColumnType::Real:
        if (const std::int64_t* v = std::get_if<std::int64_t>(&c)) c = double(*v);
        if (!std::holds_alternative<double>(c))
          throw ValidationError("table " + name_ + ": column '" + col.name + "' expects a real");
        if (!std::isfinite(std::get<double>(c)) && !status)
          throw ValidationError("table " + name_ + ": non-finite value in column '" + col.name +
                                "' and no status column");
        break;
      case ColumnType::Integer:
        if (!std::holds_alternative<std::int64_t>(c))
          throw ValidationError("table " + name_ + ": column '" + col.name + "' expects an integer");
        break;
      case ColumnType::Text:
        if (!std::holds_alternative<std::string>(c))
          throw ValidationError("table " + name_ + ": column '" + col.name + "' expects text");
        break;
    }
  }
  rows_.push_back(std::move(row));
}

void ResultTable::set_provenance(const std::string& key, const std::string& value) {
  if (key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos)
    throw ValidationError("provenance entries may not contain newlines or '=' in the key");
  for (auto& kv : provenance_) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  provenance_.emplace_back(key, value);
}

Format format_from_name(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw ValidationError("unknown format '" + name + "' (expected csv or json)");
}

const char* extension(Format f) { return f == Format::Csv ? "csv" : "json"; }

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const ResultTable& t) {
  std::string out;
  for (const auto& [k, v] : t.provenance()) out += "# " + k + "=" + v + "\n";
  for (std::size_t i = 0; i < t.columns().size(); ++i) {
    if (i) out += ',';
    out += csv_field(t.columns()[i].name);
  }
  out += '\n';
  for (const auto& row : t.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += std::holds_alternative<std::string>(row[i]) ? csv_field(std::get<std::string>(row[i]))
                                                          : cell_text(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const ResultTable& t) {
  auto str = [](const std::string& s) { return nlohmann::json(s).dump(); };
  static const char* type_names[] = {"real", "integer", "text"};
  std::string out = "{\n  \"name\": " + str(t.name()) + ",\n  \"provenance\": {";
  for (std::size_t i = 0; i < t.provenance().size(); ++i) {
    out += i ? ", " : "";
    out += str(t.provenance()[i].first) + ": " + str(t.provenance()[i].second);
  }
  out += "},\n  \"columns\": [";
  for (std::size_t i = 0; i < t.columns().size(); ++i) {
    out += i ? ", " : "";
    out += "{\"name\": " + str(t.columns()[i].name) + ", \"type\": \"" +
           type_names[static_cast<int>(t.columns()[i].type)] + "\"}";
  }
  out += "],\n  \"rows\": [";
  for (std::size_t r = 0; r < t.rows().size(); ++r) {
    out += r ? ",\n    [" : "\n    [";
    const auto& row = t.rows()[r];
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += i ? ", " : "";
      if (const double* d = std::get_if<double>(&row[i]))
        out += std::isfinite(*d) ? format_real(*d) : "null";
      else if (const std::int64_t* v = std::get_if<std::int64_t>(&row[i]))
        out += std::to_string(*v);
      else
        out += str(std::get<std::string>(row[i]));
    }
    out += "]";
  }
  out += t.rows().empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

ResultTable parse_csv(const std::string& text, const std::string& name) {
  std::size_t pos = 0;
  std::vector<std::pair<std::string, std::string>> prov;
  while (pos < text.size() && text[pos] == '#') {
    const std::size_t eol = text.find('\n', pos);
    const std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    const std::size_t eq = line.find('=');
    if (line.size() < 2 || line[1] != ' ' || eq == std::string::npos)
      throw ValidationError("parse_csv: malformed provenance line '" + line + "'");
    prov.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
    pos = eol == std::string::npos ? text.size() : eol + 1;
  }
  if (pos >= text.size()) throw ValidationError("parse_csv: missing header row");
  const std::vector<std::string> header = split_csv_line("", pos, text);
  std::vector<std::vector<std::string>> raw;
  while (pos < text.size()) {
    raw.push_back(split_csv_line("", pos, text));
    if (raw.back().size() != header.size())
      throw ValidationError("parse_csv: row " + std::to_string(raw.size()) + " has the wrong cell count");
  }
  std::vector<Column> cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    bool all_int = !raw.empty(), all_real = !raw.empty();
    for (const auto& row : raw) {
      std::int64_t iv;
      double dv;
      all_int = all_int && parse_int(row[i], iv);
      all_real = all_real && parse_real(row[i], dv);
    }
    cols.push_back({header[i], all_int ? ColumnType::Integer
                               : all_real ? ColumnType::Real
                                          : ColumnType::Text});
  }
  ResultTable t(name, cols);
  for (const auto& kv : prov) t.set_provenance(kv.first, kv.second);
  const bool status = t.has_status_column();
  for (const auto& row : raw) {
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (cols[i].type == ColumnType::Integer) {
        std::int64_t v;
        parse_int(row[i], v);
        cells.emplace_back(v);
      } else if (cols[i].type == ColumnType::Real) {
        double v;
        parse_real(row[i], v);
        if (!std::isfinite(v) && !status)
          throw ValidationError("parse_csv: non-finite value without a status column");
        cells.emplace_back(v);
      } else {
        cells.emplace_back(row[i]);
      }
    }
    t.add_row(std::move(cells));
  }
  return t;
}

std::filesystem::path write_table(const ResultTable& t, const std::filesystem::path& dir, Format f) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  const std::filesystem::path path = dir / (t.name() + "." + extension(f));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << (f == Format::Csv ? to_csv(t) : to_json(t));
  if (!out) throw std::runtime_error("write failed for " + path.string());
  return path;
}

}  // namespace grnsp::cli
