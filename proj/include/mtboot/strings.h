//
// Copyright 2026 The mtboot Authors
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
//

#ifndef MTBOOT_STRINGS_H_
#define MTBOOT_STRINGS_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mtboot {

// Splits on runs of ASCII whitespace; no empty pieces.
std::vector<std::string> SplitWhitespace(std::string_view text);

// Splits on every occurrence of `delim`; keeps empty pieces.
std::vector<std::string> Split(std::string_view text, char delim);

std::string Join(std::span<const std::string> pieces, std::string_view sep);

std::string_view StripAsciiWhitespace(std::string_view text);

std::string AsciiLower(std::string_view text);

bool ContainsWhitespace(std::string_view text);

// Parses a whole string as a finite-or-infinite double ("inf", "-inf" ok).
// Returns false on trailing garbage or empty input.
bool ParseDouble(std::string_view text, double* out);
bool ParseInt(std::string_view text, long long* out);

// Round-trippable decimal form of a double.
std::string FormatDouble(double value);

// Fixed-point form with `digits` decimals.
std::string FormatFixed(double value, int digits);

// 64-bit FNV-1a.
uint64_t Fingerprint(std::string_view data);
std::string FingerprintHex(std::string_view data);

// Byte length of the UTF-8 code points making up the first `n` characters
// (or the whole string when shorter).
size_t Utf8PrefixBytes(std::string_view text, size_t n);
size_t Utf8Length(std::string_view text);

}  // namespace mtboot

#endif  // MTBOOT_STRINGS_H_
