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

#include "voxelforge/labels.hpp"

namespace voxelforge {

const std::array<Rgb, kClassCount> kClassPalette = {{
    {0.00, 0.00, 0.00},  // empty
    {0.84, 0.85, 0.90},  // ceiling
    {0.58, 0.44, 0.29},  // floor
    {0.93, 0.82, 0.55},  // wall
    {0.38, 0.69, 0.93},  // window
    {0.89, 0.25, 0.22},  // chair
    {0.62, 0.33, 0.75},  // bed
    {0.20, 0.63, 0.45},  // sofa
    {0.96, 0.57, 0.15},  // table
    {0.16, 0.18, 0.45},  // tvs
    {0.55, 0.78, 0.25},  // furniture
    {0.95, 0.30, 0.65},  // objects
}};

}  // namespace voxelforge
