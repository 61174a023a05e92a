// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace mapo {

/// Entry point of the `mapo` command line. Returns 0 on success, 1 on
/// validation or runtime failures and 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mapo
