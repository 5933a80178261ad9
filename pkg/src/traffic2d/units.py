"""Unit conversion constants.

Ingested trajectory data is in meters/seconds; macroscopic series use km/h and
veh/km; solver scenarios run in SI. All conversions go through these constants.
"""

M_PER_KM = 1000.0
S_PER_H = 3600.0

KMH_TO_MS = M_PER_KM / S_PER_H   # 1 km/h in m/s
MS_TO_KMH = S_PER_H / M_PER_KM


def veh_per_m_to_veh_per_km(density):
    return density * M_PER_KM


def veh_per_km_to_veh_per_m(density):
    return density / M_PER_KM


def surface_density(veh_per_km, width_m):
    """Convert a per-road-length density (veh/km) to a surface density (veh/m^2).

    The road's full jam density r_max is quoted per km of road; dividing by the
    road width spreads it over the 2D domain used by the planar model.
    """
    return veh_per_km / (M_PER_KM * width_m)
