use proptest::prelude::*;
use rfc_core::complex::Window;
use rfc_core::grading::{default_epsilon, rpn_action_shift_script};
use rfc_core::io::{parse, serialize, Document};
use rfc_core::pwc::OscProfile;
use rfc_core::{gen, Action, Error, Fp};

fn stable(d: &Document) {
    let once = serialize(d);
    let back = parse(&once).unwrap_or_else(|e| panic!("{e}\n{once}"));
    assert_eq!(serialize(&back), once);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_documents_round_trip(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 7])) {
        let f = Fp::new(p).unwrap();
        let mut rng = gen::rng(seed);
        let levels: Vec<Action> = (0..9).map(|k| Action::ratio(k, 3)).collect();
        stable(&Document::Complex(gen::random_complex(&mut rng, f, 6, &levels, false, 3)));
        stable(&Document::Dga { dga: gen::random_dga(&mut rng, f, 6), augmentation: None });
        let (link, counts, _) = gen::random_link_instance(&mut rng, f, 3, 3, 2);
        stable(&Document::Counts { field: f, counts: counts.clone() });
        stable(&Document::LinkDga { link, augmentation: None, counts: Some(counts) });
    }
}

#[test]
fn scripts_and_profiles_round_trip() {
    for n in 1..=3 {
        let w = Window::finite(Action::int(0), Action::pi_linear(rfc_core::action::qi(3), rfc_core::action::qi(0)));
        stable(&Document::PwcScript(rpn_action_shift_script(n, &w, &default_epsilon(n)).unwrap()));
    }
    stable(&Document::OscProfile(OscProfile::constant(rfc_core::action::q(1, 4)).unwrap()));
}

fn path_of(text: &str) -> String {
    match parse(text) {
        Err(Error::Parse { path, .. }) => path,
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn errors_name_the_field() {
    let one = r#"{"kind":"dga","version":1,"field":2,"generators":[{"name":"a","degree":0,"action":"1/0"}],"differential":{}}"#;
    assert!(path_of(one).contains("generators[0].action"), "{}", path_of(one));
    let dup = r#"{"kind":"dga","version":1,"field":2,"generators":[{"name":"a","degree":0,"action":"1"},{"name":"a","degree":0,"action":"2"}],"differential":{}}"#;
    assert_eq!(path_of(dup), "generators[1].name");
    let unreduced = r#"{"kind":"dga","version":1,"field":2,"generators":[{"name":"a","degree":0,"action":"2/4"}],"differential":{}}"#;
    assert!(path_of(unreduced).contains("action"));
    assert_eq!(path_of(r#"{"kind":"dga","version":2}"#), "version");
    assert_eq!(path_of(r#"{"version":1}"#), "kind");
    let ok = r#"{"kind":"dga","version":1,"field":2,"generators":[{"name":"a","degree":0,"action":{"pi":"1/2","const":"0"}}],"differential":{}}"#;
    assert!(matches!(parse(ok).unwrap(), Document::Dga { .. }));
}
