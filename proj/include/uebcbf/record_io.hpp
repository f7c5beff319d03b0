// Copyright 2026 The uebcbf Authors
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
#ifndef UEBCBF_RECORD_IO_HPP_
#define UEBCBF_RECORD_IO_HPP_

#include <string>

#include "uebcbf/simulation.hpp"

namespace uebcbf {

std::string csv_header(int n, int m);
std::string to_csv(const SimRecord& record);

// Throw IoError (with the path) on failure or an empty record.
void write_csv(const SimRecord& record, const std::string& path);
SimRecord read_csv(const std::string& path);
SimRecord parse_csv(const std::string& text);

// Time series of x, u, h and the margin, plus an x0-x1 phase plot.
std::string svg_document(const SimRecord& record);
void render_svg(const SimRecord& record, const std::string& path);

}  // namespace uebcbf

#endif  // UEBCBF_RECORD_IO_HPP_
