// Copyright 2026 The TWE Authors.
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

#include "twe/alignment.hpp"
#include "twe/bilingual.hpp"
#include "twe/classifier.hpp"
#include "twe/embedding_set.hpp"
#include "twe/error.hpp"
#include "twe/evaluate.hpp"
#include "twe/io.hpp"
#include "twe/judgments.hpp"
#include "twe/lexical.hpp"
#include "twe/rbo.hpp"
#include "twe/stats.hpp"
#include "twe/text.hpp"
