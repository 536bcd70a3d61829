from flask import Flask

from config import Config

# Version of the record layout and the command set; written into every
# .meta.json next to the results
APP_VERSION = '1.0.0'


def create_app(config_class=Config):
    app = Flask(__name__)
    app.config.from_object(config_class)

    # Module loggers (eigenbound.contour, eigenbound.power, ...) propagate
    # to app.logger, which Flask names after the package
    app.logger.setLevel(app.config['LOG_LEVEL'])

    from eigenbound.commands import BLUEPRINTS
    for bp in BLUEPRINTS:
        app.register_blueprint(bp)

    return app
