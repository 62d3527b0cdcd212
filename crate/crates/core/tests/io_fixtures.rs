use proptest::prelude::*;
use signed_dec::fixtures::{self, Fixture, FixtureParams};
use signed_dec::io::{self, MeshFormat};
use signed_dec::{classify_complex, Error, OneSided, PairStatus};

fn small_params(fixture: Fixture, seed: u64) -> FixtureParams {
    FixtureParams {
        resolution: if fixture == Fixture::DelaunayTetCube { 2 } else { 5 },
        seed,
        ..FixtureParams::default()
    }
}

#[test]
fn every_fixture_round_trips_through_its_file_format() {
    let dir = tempfile::tempdir().unwrap();
    for fixture in Fixture::ALL {
        let mesh = fixtures::generate(fixture, &small_params(fixture, 3)).unwrap();
        let written = io::write_mesh(&mesh, &dir.path().join(fixture.name())).unwrap();
        let expected = if mesh.format() == MeshFormat::OffSurface { 1 } else { 2 };
        assert_eq!(written.len(), expected, "{fixture}");
        for path in &written {
            let back = io::read_mesh(path).unwrap();
            assert_eq!(back, mesh, "{fixture} via {}", path.display());
        }
    }
}

#[test]
fn formats_follow_the_dimensions() {
    let p = FixtureParams::default();
    assert_eq!(fixtures::generate(Fixture::StructuredSquare, &p).unwrap().format(), MeshFormat::NodeEle2d);
    assert_eq!(fixtures::generate(Fixture::FanAroundEdge, &p).unwrap().format(), MeshFormat::NodeEle3d);
    let surface = fixtures::surface_pairwise_delaunay(4, 0.25, 0.2, 1).unwrap();
    assert_eq!(surface.format(), MeshFormat::OffSurface);
}

#[test]
fn unknown_extensions_and_missing_files_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(io::read_mesh(&dir.path().join("mesh.obj")), Err(Error::InvalidInput(_))));
    assert!(matches!(io::read_mesh(&dir.path().join("absent.node")), Err(Error::Io(_))));
}

#[test]
fn fixture_parameters_are_validated() {
    assert!(matches!(fixtures::structured_square(0), Err(Error::Fixture(_))));
    assert!(matches!(fixtures::perturbed_delaunay_square(4, 0.9, 1), Err(Error::Fixture(_))));
    assert!(matches!(fixtures::non_delaunay_square(4, 0.25, 1, 0), Err(Error::Fixture(_))));
    assert!(fixtures::fan_around_edge(4, 2.5).is_err());
    assert!("no_such_fixture".parse::<Fixture>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn good_squares_qualify(seed in 0u64..10_000) {
        for fixture in [Fixture::PerturbedDelaunaySquare, Fixture::ObtuseDelaunaySquare] {
            let c = fixtures::generate(fixture, &small_params(fixture, seed)).unwrap().build().unwrap();
            prop_assert!(classify_complex(&c).is_qualifying());
        }
    }

    #[test]
    fn bad_boundary_square_fails_only_at_the_boundary(seed in 0u64..10_000) {
        let c = fixtures::bad_boundary_square(5, 0.25, seed).unwrap().build().unwrap();
        let report = classify_complex(&c);
        prop_assert!(report.pairs.iter().all(|p| p.status == PairStatus::Strict));
        prop_assert_eq!(report.boundary.iter().filter(|b| b.status == OneSided::No).count(), 1);
    }

    #[test]
    fn non_delaunay_square_has_violated_pairs(seed in 0u64..10_000, flips in 1usize..4) {
        let c = fixtures::non_delaunay_square(5, 0.25, seed, flips).unwrap().build().unwrap();
        let report = classify_complex(&c);
        prop_assert!(report.violated_pairs().count() >= flips);
        prop_assert!(report.non_one_sided().next().is_none());
    }

    #[test]
    fn surface_and_tets_are_pairwise_delaunay(seed in 0u64..10_000) {
        for fixture in [Fixture::SurfacePairwiseDelaunay, Fixture::DelaunayTetCube] {
            let c = fixtures::generate(fixture, &small_params(fixture, seed)).unwrap().build().unwrap();
            let report = classify_complex(&c);
            prop_assert!(report.pairs.iter().all(|p| p.status == PairStatus::Strict), "{}", fixture);
        }
    }
}
