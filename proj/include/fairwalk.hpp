// Copyright 2026 The fairwalk Authors
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

#include "fairwalk/alias.hpp"
#include "fairwalk/common.hpp"
#include "fairwalk/config.hpp"
#include "fairwalk/crosswalk.hpp"
#include "fairwalk/csv.hpp"
#include "fairwalk/embed.hpp"
#include "fairwalk/evaluate.hpp"
#include "fairwalk/graph.hpp"
#include "fairwalk/metrics.hpp"
#include "fairwalk/pca.hpp"
#include "fairwalk/pipeline.hpp"
#include "fairwalk/propagation.hpp"
#include "fairwalk/sbm.hpp"
#include "fairwalk/sweep.hpp"
#include "fairwalk/walk.hpp"
