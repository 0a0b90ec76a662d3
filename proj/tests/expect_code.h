// Copyright 2026 The ESFL Authors
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

#ifndef ESFL_TESTS_EXPECT_CODE_H_
#define ESFL_TESTS_EXPECT_CODE_H_

#include <gtest/gtest.h>

#include "esfl/error.h"

namespace esfl::testing {

template <typename Fn>
void ExpectCode(ErrorCode code, Fn&& fn) {
  try {
    fn();
    ADD_FAILURE() << "no exception, expected " << ErrorCodeName(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace esfl::testing

#endif  // ESFL_TESTS_EXPECT_CODE_H_
