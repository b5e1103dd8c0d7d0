#!/usr/bin/env python3
"""Convert archived NFL GameCenter JSON feeds into nflfastR-style play-by-play CSVs.

Offline fallback for environments where the public nflfastR mirrors are not
reachable. The GameCenter archive shipped inside the public-domain
``nflgame-redux`` wheel (``nflgame/gamecenter-json`` + ``schedule.json``)
covers 2009 through the 2019 season.

Only the columns consumed by ``nflsim`` are emitted; column names and value
conventions follow nflfastR.

Usage:
    gamecenter_to_pbp.py --nflgame-dir DIR --seasons 2018,2019 --out data/pbp
"""

import argparse
import csv
import gzip
import json
import os
import re
import sys

RUSH_IDS = {10, 11, 12, 13}
RECV_IDS = {21, 22, 23, 24}
PASS_IDS = {14, 15, 16, 19}
SACK_ID = 20
PUNT_IDS = {2, 29, 30, 31, 32}
PUNT_RET_IDS = {33, 34, 35, 36}
KICKOFF_IDS = {41, 42, 43, 44, 45, 46, 47, 48, 49, 50, 51, 102, 107, 108, 410}
FG_MADE, FG_MISSED, FG_BLOCKED = 70, 69, 71
XP_GOOD, XP_IDS = 72, {72, 73, 74, 301}
TWO_PT_IDS = {75, 76, 77, 78, 104, 105}
TWO_PT_GOOD = {75, 77}
TD_IDS = {11, 13, 16, 22, 24, 26, 28, 34, 36, 46, 48, 56, 58, 60, 62, 64, 108}
SAFETY_ID = 89
FUMBLE_LOST_ID = 106
INT_IDS = {19}

COLUMNS = [
    "play_id", "game_id", "season", "season_type", "week", "posteam", "defteam",
    "qtr", "half_seconds_remaining", "down", "ydstogo", "yardline_100",
    "play_type", "yards_gained", "touchdown", "td_team", "interception",
    "fumble_lost", "safety", "field_goal_result", "kick_distance",
    "return_yards", "score_differential", "pass_attempt", "sack",
    "complete_pass", "passing_yards", "pass_touchdown", "qb_scramble", "two_point_attempt",
    "desc",
]


def season_of(game):
    return game["year"] if game["month"] > 2 else game["year"] - 1


def yardline_100(yrdln, posteam):
    yrdln = (yrdln or "").strip()
    if not yrdln:
        return None
    if yrdln == "50":
        return 50
    m = re.match(r"^([A-Z]+)\s+(\d+)$", yrdln)
    if not m:
        return None
    side, n = m.group(1), int(m.group(2))
    return 100 - n if side == posteam else n


def half_seconds(qtr, clock):
    try:
        mm, ss = clock.split(":")
        secs = int(mm or 0) * 60 + int(ss or 0)
    except (ValueError, AttributeError):
        return None
    return secs + 900 if qtr in (1, 3) else secs


def stats_of(play):
    out = []
    for entries in play.get("players", {}).values():
        for s in entries:
            out.append((s["statId"], s.get("clubcode"), s.get("yards") or 0.0))
    return out


def classify(play, ids):
    desc = play.get("desc") or ""
    if "No Play" in desc or "NO PLAY" in desc:
        return "no_play"
    if ids & TWO_PT_IDS or "TWO-POINT CONVERSION" in desc:
        return "two_point"
    if ids & {FG_MADE, FG_MISSED, FG_BLOCKED}:
        return "field_goal"
    if ids & XP_IDS:
        return "extra_point"
    if ids & KICKOFF_IDS:
        return "kickoff"
    if ids & PUNT_IDS:
        return "punt"
    if "spiked" in desc:
        return "qb_spike"
    if "kneels" in desc:
        return "qb_kneel"
    if ids & PASS_IDS or SACK_ID in ids:
        return "pass"
    if ids & RUSH_IDS:
        return "run"
    return ""


def convert_game(eid, meta, path):
    with gzip.open(path, "rt") as fh:
        game = json.load(fh)[eid]
    home, away = game["home"]["abbr"], game["away"]["abbr"]
    score = {home: 0, away: 0}
    plays = []
    for dk, drive in game["drives"].items():
        if not dk.isdigit():
            continue
        for pk, play in drive["plays"].items():
            plays.append((int(pk), play))
    plays.sort(key=lambda t: t[0])

    rows = []
    for pid, play in plays:
        stats = stats_of(play)
        ids = {s[0] for s in stats}
        posteam = play.get("posteam") or ""
        defteam = away if posteam == home else home
        ptype = classify(play, ids)
        down = play.get("down") or 0
        two_point = ptype == "two_point"
        if two_point:
            ptype = "pass" if ids & {77, 78, 104, 105} else "run"
            down = 0

        def yards(idset, team=None):
            return int(sum(y for sid, club, y in stats
                           if sid in idset and (team is None or club == team)))

        gained = 0
        if ptype in ("run", "pass", "qb_kneel", "qb_spike"):
            gained = yards(RUSH_IDS, posteam) + yards(RECV_IDS, posteam) + yards({SACK_ID}, posteam)
        td_clubs = [club for sid, club, _ in stats if sid in TD_IDS]
        touchdown = 1 if td_clubs else 0
        td_team = td_clubs[0] if td_clubs else ""
        fg_result = ""
        kick_distance = ""
        return_yards = ""
        if ptype == "field_goal":
            if FG_MADE in ids:
                fg_result, kick_distance = "made", yards({FG_MADE})
            elif FG_BLOCKED in ids:
                fg_result, kick_distance = "blocked", yards({FG_BLOCKED})
            else:
                fg_result, kick_distance = "missed", yards({FG_MISSED})
        elif ptype == "punt":
            if ids & {29, 31, 32}:
                kick_distance = yards({29, 31, 32})
            return_yards = yards(PUNT_RET_IDS)
        complete = 1 if ids & {15, 16} else 0
        is_sack = 1 if SACK_ID in ids else 0
        pass_att = 1 if (ptype == "pass" and not two_point) else 0
        pass_yds = yards({15, 16}) if complete else ""

        rows.append({
            "play_id": pid,
            "game_id": eid,
            "season": season_of(meta),
            "season_type": meta["season_type"],
            "week": meta["week"],
            "posteam": posteam,
            "defteam": defteam,
            "qtr": play.get("qtr"),
            "half_seconds_remaining": half_seconds(play.get("qtr"), play.get("time")),
            "down": down if down else "",
            "ydstogo": play.get("ydstogo"),
            "yardline_100": yardline_100(play.get("yrdln"), posteam),
            "play_type": ptype,
            "yards_gained": gained,
            "touchdown": touchdown,
            "td_team": td_team,
            "interception": 1 if ids & INT_IDS else 0,
            "fumble_lost": 1 if any(sid == FUMBLE_LOST_ID and club == posteam for sid, club, _ in stats) else 0,
            "safety": 1 if SAFETY_ID in ids else 0,
            "field_goal_result": fg_result,
            "kick_distance": kick_distance,
            "return_yards": return_yards,
            "score_differential": score.get(posteam, 0) - score.get(defteam, 0) if posteam else "",
            "pass_attempt": pass_att,
            "sack": is_sack,
            "complete_pass": complete,
            "passing_yards": pass_yds,
            "pass_touchdown": 1 if 16 in ids else 0,
            "qb_scramble": 1 if (ptype == "run" and "scrambles" in (play.get("desc") or "")) else 0,
            "two_point_attempt": 1 if two_point else 0,
            "desc": play.get("desc") or "",
        })

        if td_team in score:
            score[td_team] += 6
        for sid, club, _ in stats:
            if sid == XP_GOOD and club in score:
                score[club] += 1
            elif sid in TWO_PT_GOOD and club in score:
                score[club] += 2
            elif sid == FG_MADE and club in score:
                score[club] += 3
            elif sid == SAFETY_ID and club in score:
                score[club] += 2
    return rows, score, game["home"]["score"]["T"], game["away"]["score"]["T"], home, away


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nflgame-dir", required=True,
                    help="directory containing schedule.json and gamecenter-json/")
    ap.add_argument("--seasons", required=True, help="comma separated seasons")
    ap.add_argument("--season-types", default="REG,POST")
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)

    seasons = {int(s) for s in args.seasons.split(",")}
    types = set(args.season_types.split(","))
    with open(os.path.join(args.nflgame_dir, "schedule.json")) as fh:
        sched = dict(json.load(fh)["games"])
    os.makedirs(args.out, exist_ok=True)

    for season in sorted(seasons):
        games = sorted(eid for eid, g in sched.items()
                       if season_of(g) == season and g["season_type"] in types)
        out_path = os.path.join(args.out, "play_by_play_%d.csv.gz" % season)
        n_rows = n_games = mismatched = 0
        with gzip.open(out_path, "wt", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=COLUMNS)
            w.writeheader()
            for eid in games:
                path = os.path.join(args.nflgame_dir, "gamecenter-json", eid + ".json.gz")
                if not os.path.exists(path):
                    print("missing %s" % eid, file=sys.stderr)
                    continue
                rows, score, home_t, away_t, home, away = convert_game(eid, sched[eid], path)
                if score[home] != home_t or score[away] != away_t:
                    mismatched += 1
                w.writerows(rows)
                n_rows += len(rows)
                n_games += 1
        print("%s: %d games, %d rows, %d games with score drift" % (out_path, n_games, n_rows, mismatched))


if __name__ == "__main__":
    main()
