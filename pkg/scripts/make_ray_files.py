"""Regenerate the ray files under src/ksgen/data.

yu-oh-13 is typed in; closure-25 is computed from it; ck-37 and schutte-33
come from the (0,0,1), (0,1,±1), (0,1,±2), (1,1,±1), (1,±1,±2) family.
"""

from pathlib import Path

from ksgen.geom import RaySet, closure, family_37, schutte_33

YU_OH = [
    (1, 0, 0), (0, 1, 0), (0, 0, 1),
    (0, 1, 1), (0, 1, -1), (1, 0, 1), (1, 0, -1), (1, 1, 0), (1, -1, 0),
    (1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1),
]

DATA = Path(__file__).resolve().parents[1] / "src" / "ksgen" / "data"


def main():
    yu_oh = RaySet(sorted(RaySet(YU_OH).rays))
    sets = {
        "yu-oh-13": (yu_oh, "Yu-Oh 13-ray set"),
        "closure-25": (closure(yu_oh), "orthogonal-pair closure of yu-oh-13"),
        "schutte-33": (schutte_33(), "37-ray family minus (0,1,+-2), (0,2,+-1)"),
        "ck-37": (family_37(), "Conway-Kochen 37-ray family"),
    }
    for name, (rs, note) in sets.items():
        rs.write(DATA / f"{name}.rays", f"{name}: {note}\n{len(rs)} rays, generated by scripts/make_ray_files.py")
        print(name, len(rs))


if __name__ == "__main__":
    main()
