"""Parked-vehicle occupancy per run (ground-truth column) and zone capacities."""

CAPACITIES = [("park1", 6), ("park2", 1), ("park3", 1), ("park4", 11), ("park5", 5)]

# run -> zone -> (detected, ground truth, capacity) as published
TABLE_A = {
    1: {"park1": (6, 6, 6), "park2": (1, 1, 1), "park3": (1, 1, 1), "park4": (10, 10, 11), "park5": (5, 5, 5)},
    2: {"park1": (6, 6, 6), "park2": (1, 1, 1), "park3": (1, 1, 1), "park4": (10, 10, 11), "park5": (5, 5, 5)},
    3: {"park1": (6, 6, 6), "park2": (0, 0, 1), "park3": (1, 1, 1), "park4": (10, 10, 11), "park5": (5, 5, 5)},
    4: {"park1": (2, 2, 6), "park2": (0, 0, 1), "park3": (1, 1, 1), "park4": (10, 10, 11), "park5": (5, 5, 5)},
    5: {"park1": (3, 3, 6), "park2": (1, 1, 1), "park3": (1, 1, 1), "park4": (9, 10, 11), "park5": (5, 5, 5)},
    6: {"park1": (4, 4, 6), "park2": (1, 1, 1), "park3": (1, 1, 1), "park4": (7, 7, 11), "park5": (5, 5, 5)},
}
FALSE_POSITIVES = {1: 2, 2: 4, 3: 3, 4: 3, 5: 2, 6: 2}


def schedule():
    from curbscan.simgen import zone_street

    return [
        (zone_street(CAPACITIES, {z: v[1] for z, v in TABLE_A[run].items()}, seed=run),
         f"2015-06-01T10:{2 * run:02d}:00Z")
        for run in sorted(TABLE_A)
    ]
