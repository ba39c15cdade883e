#include "tilebn/json_writer.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tilebn/error.hpp"

namespace tilebn {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string escape_json(const std::string& text) {
  std::string out;
  out.reserve(text.size() + 2);
  for (unsigned char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buffer[8];
          std::snprintf(buffer, sizeof(buffer), "\\u%04x", c);
          out += buffer;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

void JsonWriter::newline_indent() {
  out_ += '\n';
  out_.append(2 * has_element_.size(), ' ');
}

void JsonWriter::prepare_value() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!has_element_.empty()) {
    if (has_element_.back()) out_ += ',';
    newline_indent();
    has_element_.back() = true;
  }
}

void JsonWriter::open(char bracket) {
  prepare_value();
  out_ += bracket;
  has_element_.push_back(false);
}

void JsonWriter::close(char bracket) {
  const bool had_elements = has_element_.back();
  has_element_.pop_back();
  if (had_elements) newline_indent();
  out_ += bracket;
  if (has_element_.empty()) out_ += '\n';
}

JsonWriter& JsonWriter::begin_object() { open('{'); return *this; }
JsonWriter& JsonWriter::end_object() { close('}'); return *this; }
JsonWriter& JsonWriter::begin_array() { open('['); return *this; }
JsonWriter& JsonWriter::end_array() { close(']'); return *this; }

JsonWriter& JsonWriter::key(const std::string& name) {
  if (has_element_.back()) out_ += ',';
  newline_indent();
  has_element_.back() = true;
  out_ += '"';
  out_ += escape_json(name);
  out_ += "\": ";
  pending_key_ = true;
  return *this;
}

void JsonWriter::raw(const std::string& text) {
  prepare_value();
  out_ += text;
}

JsonWriter& JsonWriter::value(const std::string& text) {
  raw('"' + escape_json(text) + '"');
  return *this;
}

JsonWriter& JsonWriter::value(const char* text) { return value(std::string(text)); }

JsonWriter& JsonWriter::value(double number) {
  raw(format_double(number));
  return *this;
}

JsonWriter& JsonWriter::value(int number) { raw(std::to_string(number)); return *this; }
JsonWriter& JsonWriter::value(int64_t number) { raw(std::to_string(number)); return *this; }
JsonWriter& JsonWriter::value(uint64_t number) { raw(std::to_string(number)); return *this; }

JsonWriter& JsonWriter::value(bool flag) {
  raw(flag ? "true" : "false");
  return *this;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      fail(ErrorCode::IoError, "cannot write to '" + temp.string() + "'");
    }
    out << content;
    if (!out.good()) {
      fail(ErrorCode::IoError, "short write to '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    fail(ErrorCode::IoError, "cannot rename temporary file onto '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::IoError, "cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace tilebn
