// Copyright 2026 The LDPFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPFL_INTERNAL_STATUS_MACROS_H_
#define LDPFL_INTERNAL_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define LDPFL_STATUS_CONCAT_INNER_(a, b) a##b
#define LDPFL_STATUS_CONCAT_(a, b) LDPFL_STATUS_CONCAT_INNER_(a, b)

#define LDPFL_RETURN_IF_ERROR(expr)          \
  do {                                       \
    const absl::Status _ldpfl_status = (expr); \
    if (!_ldpfl_status.ok()) return _ldpfl_status; \
  } while (0)

#define LDPFL_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                 \
  if (!tmp.ok()) return tmp.status();                 \
  lhs = std::move(tmp).value()

// Evaluates `rexpr` (a StatusOr) and either assigns its value to `lhs` or
// returns the error from the enclosing function.
#define LDPFL_ASSIGN_OR_RETURN(lhs, rexpr) \
  LDPFL_ASSIGN_OR_RETURN_IMPL_(            \
      LDPFL_STATUS_CONCAT_(_ldpfl_statusor_, __LINE__), lhs, rexpr)

#endif  // LDPFL_INTERNAL_STATUS_MACROS_H_
