#pragma once

#include <string>

#include <json.hpp>

namespace gridflow {

std::string read_text_file(const std::string& path);
/// Creates parent directories as needed.
void write_text_file(const std::string& path, const std::string& contents);

/// Parses JSON; syntax errors are reported as ValidationError with line:column.
nlohmann::json parse_json_document(const std::string& text, const std::string& source_name);

/// Shortest decimal text that reads back to the identical double.
std::string format_double(double v);
/// Strict parse of a full token as double; throws ValidationError with context.
double parse_double(const std::string& token, const std::string& where);

}  // namespace gridflow
