/*
 * Copyright 2026 The vsheet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>

#ifdef VSHEET_HAVE_OPENMP
#include <omp.h>
#endif

namespace vsheet::detail {

/// Runs body(i) for i in [0, n). Each index must write only its own output
/// slot; reductions are done serially by the caller so results do not depend
/// on the thread count.
template <typename Body>
void parallel_for(std::int64_t n, Body&& body) {
#ifdef VSHEET_HAVE_OPENMP
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) body(i);
#else
    for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

inline void set_thread_count(int n) {
#ifdef VSHEET_HAVE_OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace vsheet::detail
