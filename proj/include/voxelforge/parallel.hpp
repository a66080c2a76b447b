/*
 * Copyright 2026 The VoxelForge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VOXELFORGE_PARALLEL_HPP_
#define VOXELFORGE_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace voxelforge {

// Worker count: VOXELFORGE_THREADS if set and positive, otherwise the
// hardware concurrency. Never less than 1.
int worker_count();

// Overrides the worker count for the current process (0 restores the
// environment-derived default). Used by tests to force single-threaded runs.
void set_worker_count(int count);

// Runs body(i) for every i in [begin, end). Indices are split into
// contiguous chunks, one per worker. Each index is visited exactly once, so
// callers that write disjoint outputs per index get results independent of
// the worker count. Calls nested inside a body run serially.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace voxelforge

#endif  // VOXELFORGE_PARALLEL_HPP_
