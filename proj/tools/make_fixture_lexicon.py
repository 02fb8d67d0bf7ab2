#!/usr/bin/env python3
# Copyright 2026 The pcot-harness Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Cut the small test lexicon out of a full CMU-format dictionary.

usage: make_fixture_lexicon.py FULL_DICT OUT_FILE
"""
import re
import sys

WORDS = """
grace has resigned herself to simply completing the upbringing of her teenage daughter
this story is about a young girl's redemption in small town
one thing that hasn't happened proposal
she meets him randomly woods at his family's cabin
just simple blacksmith assistant he didn't have much offer but love
top it all off i miss my stunner
education circulation occupation reputation population reservation
information isolation operation conversation corporation demonstration
available distrainable explainable restrainable retainable retrainable
transport passport escort report resort retort
interesting beginning interrupting diminishing investing referencing
technology eternity innocuity unity activity amusingly
basement apparently calorie freshman breeze invite
cat hat bat mat sat rat flat that chat
orange purple silver month
nation station relation creation vacation
light night bright flight sight might tight kite
either tomato route data
table music garden window
quixotic ephemeral serendipity
sky moon star tree river mountain
dog log fog frog
""".split()

def main():
    src, out = sys.argv[1], sys.argv[2]
    wanted = set(WORDS)
    rows = []
    with open(src, encoding="latin-1") as fh:
        for line in fh:
            line = line.split("#", 1)[0].rstrip()
            if not line:
                continue
            head, phones = line.split(None, 1)
            base = re.sub(r"\(\d+\)$", "", head)
            if base in wanted:
                rows.append((head.upper(), " ".join(phones.split())))
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(";;; Test lexicon extracted from the CMU Pronouncing Dictionary.\n")
        fh.write(";;; Copyright (C) 1993-2015 Carnegie Mellon University. All rights reserved.\n")
        fh.write(";;; Redistributed under the CMUdict BSD-style license (see data/fixtures/CMUDICT_LICENSE).\n")
        for head, phones in rows:
            fh.write(f"{head}  {phones}\n")
    missing = sorted(w for w in wanted if not any(r[0].split("(")[0] == w.upper() for r in rows))
    print("missing:", " ".join(missing))

if __name__ == "__main__":
    main()
