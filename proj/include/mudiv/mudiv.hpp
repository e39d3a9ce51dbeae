// Copyright 2026 The mudiv Authors
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

#include "mudiv/capture.hpp"
#include "mudiv/channel.hpp"
#include "mudiv/dedicated.hpp"
#include "mudiv/errors.hpp"
#include "mudiv/mc.hpp"
#include "mudiv/muvdiv.hpp"
#include "mudiv/rng.hpp"
#include "mudiv/snrfb.hpp"
#include "mudiv/specfun.hpp"
