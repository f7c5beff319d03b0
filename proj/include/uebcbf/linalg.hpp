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

#ifndef UEBCBF_LINALG_HPP_
#define UEBCBF_LINALG_HPP_

#include <Eigen/Dense>

namespace uebcbf {

using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;
using Mat = Eigen::MatrixXd;

inline bool all_finite(const Eigen::Ref<const Mat>& a) { return a.allFinite(); }

}  // namespace uebcbf

#endif  // UEBCBF_LINALG_HPP_
