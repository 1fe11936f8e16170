// Copyright 2026 The seqmanip Authors
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

#include "seqmanip/dp.hpp"
#include "seqmanip/engine.hpp"
#include "seqmanip/generators.hpp"
#include "seqmanip/greedy.hpp"
#include "seqmanip/instance_io.hpp"
#include "seqmanip/model.hpp"
#include "seqmanip/oracle.hpp"
#include "seqmanip/policy.hpp"
#include "seqmanip/rational.hpp"
#include "seqmanip/responses.hpp"
#include "seqmanip/sweep.hpp"
