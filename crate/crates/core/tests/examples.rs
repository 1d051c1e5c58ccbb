//! Every example under `examples/` must run to completion.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(bounds_report);
example!(genie_search);
example!(regime_map);
example!(gaussian_identities);
example!(fme_projection);
example!(sweep_csv);
example!(verify_suites);
