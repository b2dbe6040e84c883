// Copyright 2026 The qfc Authors
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

#ifndef QFC_PARALLEL_HPP_
#define QFC_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace qfc {

// Worker count: QFC_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int worker_count();

// Calls fn(i) for i in [0, n) on up to `threads` workers (worker_count() when
// threads <= 0). Results must be written to index-keyed slots so that the
// outcome does not depend on scheduling. The first exception thrown by fn is
// rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace qfc

#endif  // QFC_PARALLEL_HPP_
