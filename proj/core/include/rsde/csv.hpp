// Copyright 2026 The rsde Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace rsde {

// Shortest round-trip decimal form; identical inputs give identical text.
std::string format_double(double v);

// Minimal CSV writer; throws Error when the file cannot be opened.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(unsigned long long v);
  CsvWriter& field(std::size_t v) { return field(static_cast<unsigned long long>(v)); }
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(std::string_view v);
  CsvWriter& field(const char* v) { return field(std::string_view(v)); }
  CsvWriter& field(bool v) { return field(std::string_view(v ? "true" : "false")); }
  void end_row();

 private:
  std::ofstream out_;
  bool row_started_ = false;
};

// Reads a CSV with a header row into rows of string cells.
std::vector<std::vector<std::string>> read_csv(const std::string& path, bool skip_header = true);

}  // namespace rsde
