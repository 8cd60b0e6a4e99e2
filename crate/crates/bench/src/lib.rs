// Copyright 2026 The qnd Authors
// SPDX-License-Identifier: Apache-2.0

//! Benchmarks live in `benches/`.
