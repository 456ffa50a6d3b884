if __name__ == '__main__':
    import sys

    from cli.commands import run_cli

    sys.exit(run_cli(sys.argv[1:]))
