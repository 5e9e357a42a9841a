#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace sgvf {

// Shortest representation that parses back to the identical double.
std::string format_double(double v);

std::ofstream open_output(const std::string& path);
std::ifstream open_input(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

// Strict double parse; `where` names the file/line in the error message.
double parse_double(const std::string& token, const std::string& where);
long parse_long(const std::string& token, const std::string& where);

} // namespace sgvf
