// Copyright 2026 The garmentkit Authors.
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
#pragma once

#include <cstddef>
#include <functional>

namespace garmentkit {

/// Number of worker threads used by data-parallel kernels. Defaults to the
/// GARMENTKIT_THREADS environment variable, else the hardware concurrency.
int thread_count();

/// Caps the worker count. Values < 1 restore the default. Results of every
/// kernel are independent of this setting.
void set_thread_count(int n);

/// Splits [0, n) into contiguous chunks of min_chunk indices that workers
/// claim dynamically, running body(begin, end) on each. Blocks until every
/// chunk finishes; the first worker exception is rethrown on the caller.
/// body must only write state owned by its index range.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace garmentkit
