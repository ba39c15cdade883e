#include "tilebn/learning.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "tilebn/error.hpp"
#include "tilebn/json_writer.hpp"

namespace tilebn {

BayesianNetwork fit_cpds(const NetworkStructure& structure, const Dataset& data,
                         const LearningConfig& config) {
  validate_structure(structure);
  if (config.pseudocount < 0.0) {
    fail(ErrorCode::ConfigInvalid, "pseudocount must be nonnegative");
  }
  if (data.rows.empty()) {
    fail(ErrorCode::EmptyDataset, "cannot fit CPDs from an empty dataset");
  }

  // Column position of every structure variable within the dataset schema.
  std::map<std::string, int> column;
  for (size_t c = 0; c < data.schema.size(); ++c) {
    column[data.schema[c]] = static_cast<int>(c);
  }
  std::map<std::string, int> cardinality;
  for (const auto& v : structure.variables) {
    cardinality[v.id] = static_cast<int>(v.states.size());
    if (!column.count(v.id)) {
      fail(ErrorCode::SchemaMismatch,
           "dataset schema is missing variable '" + v.id + "'");
    }
  }
  for (const auto& row : data.rows) {
    if (row.size() != data.schema.size()) {
      fail(ErrorCode::SchemaMismatch, "dataset row width differs from schema");
    }
  }

  const double alpha = config.pseudocount;
  std::vector<Cpd> cpds;
  cpds.reserve(structure.variables.size());
  for (const auto& v : structure.variables) {
    const auto parents_it = structure.parents.find(v.id);
    const std::vector<std::string> parent_ids =
        parents_it == structure.parents.end() ? std::vector<std::string>{}
                                              : parents_it->second;
    size_t row_count = 1;
    for (const auto& p : parent_ids) row_count *= cardinality[p];
    const int child_card = cardinality[v.id];
    const int child_col = column[v.id];

    std::vector<std::vector<double>> counts(
        row_count, std::vector<double>(child_card, 0.0));
    for (const auto& row : data.rows) {
      size_t config_index = 0;
      for (const auto& p : parent_ids) {
        config_index = config_index * cardinality[p] + row[column[p]];
      }
      counts[config_index][row[child_col]] += 1.0;
    }

    Cpd cpd;
    cpd.child = v.id;
    cpd.parent_order = parent_ids;
    cpd.table.resize(row_count);
    for (size_t j = 0; j < row_count; ++j) {
      double total = 0.0;
      for (double n : counts[j]) total += n;
      const double denom = total + alpha * child_card;
      if (denom <= 0.0) {
        fail(ErrorCode::DegenerateRow,
             "no observations and zero pseudocount for '" + v.id +
                 "' parent configuration " + std::to_string(j));
      }
      cpd.table[j].resize(child_card);
      for (int k = 0; k < child_card; ++k) {
        cpd.table[j][k] = (counts[j][k] + alpha) / denom;
      }
    }
    cpds.push_back(std::move(cpd));
  }
  return build_network(structure, cpds);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

// Accepts a bare state index or an exact state label.
int resolve_state(const Variable& var, const std::string& text, int line_no) {
  for (size_t s = 0; s < var.states.size(); ++s) {
    if (var.states[s] == text) return static_cast<int>(s);
  }
  if (!text.empty() && text.size() <= 9 &&
      std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const int index = std::stoi(text);
    if (index >= 0 && index < static_cast<int>(var.states.size())) return index;
  }
  fail(ErrorCode::UnknownStateLabel,
       "line " + std::to_string(line_no) + ": value '" + text +
           "' is not a state of '" + var.id + "'");
}

}  // namespace

Dataset cohort_from_string(const std::string& text,
                           const NetworkStructure& structure, int age_threshold,
                           const std::string& origin) {
  validate_structure(structure);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorCode::ParseError, origin + ": empty cohort file");
  }
  const std::vector<std::string> header = split_csv_line(line);
  std::map<std::string, int> position;
  for (size_t c = 0; c < header.size(); ++c) {
    position[header[c]] = static_cast<int>(c);
  }
  if (!position.count("patient_id")) {
    fail(ErrorCode::MissingColumn, origin + ": no 'patient_id' column");
  }

  // Source column per variable: the Age node reads the raw 'age' years
  // column; everything else matches by variable name, then id.
  Dataset data;
  std::vector<int> source_column;
  std::vector<const Variable*> vars;
  for (const auto& v : structure.variables) {
    data.schema.push_back(v.id);
    vars.push_back(&v);
    if (v.id == kAgeId) {
      if (!position.count("age")) {
        fail(ErrorCode::MissingColumn, origin + ": no 'age' column");
      }
      source_column.push_back(position["age"]);
      continue;
    }
    auto it = position.find(v.name);
    if (it == position.end()) it = position.find(v.id);
    if (it == position.end()) {
      fail(ErrorCode::MissingColumn, origin + ": no column for variable '" +
                                         v.name + "'");
    }
    source_column.push_back(it->second);
  }

  const int id_column = position["patient_id"];
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      fail(ErrorCode::ParseError,
           origin + ": line " + std::to_string(line_no) + " has " +
               std::to_string(fields.size()) + " fields, header has " +
               std::to_string(header.size()));
    }
    std::vector<int> row(vars.size());
    for (size_t i = 0; i < vars.size(); ++i) {
      const std::string& value = fields[source_column[i]];
      if (value.empty()) {
        fail(ErrorCode::ParseError,
             origin + ": line " + std::to_string(line_no) + " column " +
                 std::to_string(source_column[i] + 1) + " is empty");
      }
      if (vars[i]->id == kAgeId) {
        int years = 0;
        try {
          size_t used = 0;
          years = std::stoi(value, &used);
          if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
          fail(ErrorCode::ParseError,
               origin + ": line " + std::to_string(line_no) +
                   ": age '" + value + "' is not an integer");
        }
        row[i] = years >= age_threshold ? 1 : 0;
      } else {
        row[i] = resolve_state(*vars[i], value, line_no);
      }
    }
    data.rows.push_back(std::move(row));
    data.patient_ids.push_back(fields[id_column]);
  }
  return data;
}

Dataset ingest_cohort(const std::string& path, const NetworkStructure& structure,
                      int age_threshold) {
  return cohort_from_string(read_file(path), structure, age_threshold, path);
}

std::string cohort_to_string(const NetworkStructure& structure,
                             const Dataset& data) {
  std::map<std::string, int> column;
  for (size_t c = 0; c < data.schema.size(); ++c) {
    column[data.schema[c]] = static_cast<int>(c);
  }
  std::ostringstream out;
  out << "patient_id";
  std::vector<const Variable*> ordered;
  // Reserved columns first, then features in declaration order.
  const Variable* age = nullptr;
  for (const auto& v : structure.variables) {
    if (v.id == kAgeId) age = &v;
  }
  out << ",age";
  for (const auto& v : structure.variables) {
    if (v.id == kAgeId) continue;
    if (!column.count(v.id)) {
      fail(ErrorCode::SchemaMismatch, "dataset lacks variable '" + v.id + "'");
    }
    out << "," << (v.id == kRotationalId   ? "R"
                   : v.id == kTranslationalId ? "T"
                                              : v.name);
    ordered.push_back(&v);
  }
  if (age != nullptr && !column.count(age->id)) {
    fail(ErrorCode::SchemaMismatch, "dataset lacks the Age variable");
  }
  out << "\n";
  for (size_t r = 0; r < data.rows.size(); ++r) {
    out << (r < data.patient_ids.size() ? data.patient_ids[r]
                                        : "p" + std::to_string(r + 1));
    const int elderly = age != nullptr ? data.rows[r][column[age->id]] : 0;
    out << "," << (elderly ? kElderlyYears : kAdultYears);
    for (const Variable* v : ordered) {
      out << "," << data.rows[r][column[v->id]];
    }
    out << "\n";
  }
  return out.str();
}

void save_cohort(const NetworkStructure& structure, const Dataset& data,
                 const std::string& path) {
  write_file_atomic(path, cohort_to_string(structure, data));
}

}  // namespace tilebn
