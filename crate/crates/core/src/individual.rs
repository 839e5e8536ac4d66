// Copyright 2026 ipqsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Placeholder.
