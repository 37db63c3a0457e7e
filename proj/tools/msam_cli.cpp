// Copyright 2026 The MSAM Authors.
// SPDX-License-Identifier: Apache-2.0

#include "msam/harness/pipeline.hpp"

int main(int argc, char** argv) { return msam::harness::run_cli(argc, argv); }
