from flask.cli import FlaskGroup

from eigenbound import create_app

cli = FlaskGroup(create_app=create_app)

if __name__ == '__main__':
    # `python run.py bound-compare --config configs/bound_compare.json` is the
    # same as `flask --app eigenbound bound-compare ...`
    cli()
