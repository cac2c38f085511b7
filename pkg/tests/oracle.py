"""Independent brute-force evaluation of the printed score formulas.

Deliberately naive and written directly from the formulas over plain dicts
of id -> (x_cm, y_cm, orientation_deg); shares no code with the engine's
scoring module so it can serve as an oracle for it.
"""

import math


def points_of(config, geometry):
    out = {}
    for p in config.placements:
        x = (p.col + 0.5) * geometry.width / geometry.columns
        y = (p.row + 0.5) * geometry.height / geometry.rows
        out[p.building] = (x, y, p.orientation)
    return out


def number_oracle(m_pts, c_pts):
    return 1 - abs(len(m_pts) - len(c_pts)) / len(m_pts)


def difference_oracle(m_pts, c_pts):
    m_ids, c_ids = set(m_pts), set(c_pts)
    only_m = len([b for b in m_ids if b not in c_ids])
    only_c = len([b for b in c_ids if b not in m_ids])
    return 1 - (only_m + only_c) / (len(m_ids) + len(c_ids))


def distance_oracle(m_pts, c_pts, d_max, m_max):
    total = 0.0
    for b in set(m_pts) & set(c_pts):
        dx = m_pts[b][0] - c_pts[b][0]
        dy = m_pts[b][1] - c_pts[b][1]
        total += math.sqrt(dx * dx + dy * dy) / d_max
    return 1 - total / m_max


def orient_oracle(m_pts, c_pts, m_max):
    total = 0.0
    for b in set(m_pts) & set(c_pts):
        d = abs(m_pts[b][2] - c_pts[b][2]) % 360
        total += min(d, 360 - d) / 180 / m_max
    return 1 - total


def interbuilding_oracle(m_pts, c_pts, d_max, m_max):
    shared = sorted(set(m_pts) & set(c_pts))
    total = 0.0
    for i in shared:
        for j in shared:
            d_m = math.dist(m_pts[i][:2], m_pts[j][:2])
            d_c = math.dist(c_pts[i][:2], c_pts[j][:2])
            total += abs(d_m - d_c) / d_max
    return 1 - total / (m_max * m_max)


def similarity_oracle(m_pts, c_pts, d_max, m_max):
    return (difference_oracle(m_pts, c_pts)
            * distance_oracle(m_pts, c_pts, d_max, m_max)
            * orient_oracle(m_pts, c_pts, m_max))
